#include "subband/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "subband/rearrange.hpp"

namespace subband {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kVelocityOrder = 8;

double bump(double t) { return std::abs(t) < 1.0 ? (1.0 - t * t) * (1.0 - t * t) : 0.0; }

double lateral_window(const Grid& g, int l, const Perturbation& p)
{
    const double t1 = (g.y1(g.i1_of(l)) / g.L1() - p.c1) / p.r1;
    const double t2 = (g.y2(g.i2_of(l)) / g.L2() - p.c2) / p.r2;
    return bump(t1) * bump(t2);
}

double speed_window(double u, double a, double b) { return bump((2.0 * u - a - b) / (b - a)); }

int nearest_node(const Grid& g, double c1, double c2)
{
    const int i1 = std::clamp(static_cast<int>(std::lround(c1 * (g.ny1() + 1))) - 1, 0, g.ny1() - 1);
    const int i2 = std::clamp(static_cast<int>(std::lround(c2 * (g.ny2() + 1))) - 1, 0, g.ny2() - 1);
    return g.lateral_index(i1, i2);
}

double base_mass(const EquilibriumState& s, const Grid& g)
{
    double m = 0.0;
    for (const auto& r : s.rho_j)
        m += integrate_omega(r, g);
    return m;
}

CheckResult make_check(std::string name, double lhs, double rhs, bool pass)
{
    CheckResult c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.ratio = safe_ratio(lhs, rhs);
    c.pass = pass;
    return c;
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

void add_monitor(VerifyReport& rep, const std::string& name, const std::vector<double>& ratios)
{
    MonitorResult m;
    m.name = name;
    m.count = static_cast<int>(ratios.size());
    bool finite = true;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double r : ratios) {
        if (!std::isfinite(r))
            finite = false;
        if (r > 0.0)
            lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    m.min_ratio = std::isfinite(lo) ? lo : 0.0;
    m.max_ratio = hi;
    m.pass = finite && (m.min_ratio == 0.0 || hi / m.min_ratio < 1e3);
    rep.monitors.push_back(m);
}

} // namespace

bool VerifyReport::all_pass() const
{
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    for (const auto& m : monitors)
        if (!m.pass)
            return false;
    return true;
}

double safe_ratio(double lhs, double rhs) { return rhs != 0.0 ? lhs / rhs : 0.0; }

TestPair random_test_pair(const Grid& g, const Field3D& W, int J, std::mt19937_64& rng)
{
    if (J < 1 || J + 3 >= g.nz())
        throw InvalidArgument("random_test_pair: band count incompatible with the z grid");
    const int K = J + 3;
    const int nl = g.lateral_size();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Discrete sine modes are orthonormal under the trapezoid rule.
    Eigen::MatrixXd basis(g.z_size(), K);
    for (int m = 0; m < K; ++m)
        for (int k = 0; k <= g.nz(); ++k)
            basis(k, m) = std::sqrt(2.0) * std::sin(kPi * (m + 1) * g.z(k));

    TestPair p;
    p.J = J;
    p.vgrid.push_back(VelocityGrid::composite({0, 1, 2, 4, 8, 16, 24, 32, 40}, kVelocityOrder));
    const Eigen::ArrayXd u = p.vgrid[0].energy();
    p.chi.assign(J, g.zeros_3d());
    p.f.resize(nl);
    for (int l = 0; l < nl; ++l) {
        Eigen::MatrixXd C(K, J);
        for (int j = 0; j < J; ++j)
            for (int m = 0; m < K; ++m)
                C(m, j) = normal(rng) / (1.0 + m);
        for (int j = 0; j < J; ++j) {
            for (int i = 0; i < j; ++i)
                C.col(j) -= C.col(i).dot(C.col(j)) * C.col(i);
            C.col(j).normalize();
        }
        const Eigen::MatrixXd Z = basis * C;
        for (int j = 0; j < J; ++j)
            p.chi[j].col(l) = Z.col(j).array();

        Eigen::ArrayXXd f(u.size(), J);
        for (int j = 0; j < J; ++j) {
            const double c = unif(rng) < 0.2 ? 0.0 : unif(rng);
            const double tau = 0.3 + 2.7 * unif(rng);
            f.col(j) = c * (-u / tau).exp();
        }
        p.f[l] = std::move(f);
    }
    p.h = rayleigh_table(p.chi, W, g);
    return p;
}

TestPair equilibrium_pair(const EquilibriumState& s, const Grid& g, const OccupancyModel& m,
                          const std::vector<double>& extra_breaks)
{
    s.spec.require(g, "equilibrium_pair");
    const int nl = g.lateral_size();
    const int J = s.spec.J;
    const double gap = m.saturation_gap();
    TestPair p;
    p.J = J;
    p.chi = s.spec.chi;
    p.h = s.spec.lambda;
    p.vgrid.reserve(nl);
    p.f.reserve(nl);
    for (int l = 0; l < nl; ++l) {
        std::vector<double> br{0.0};
        double umax = 0.0;
        for (int j = 0; j < J; ++j) {
            const double a = s.mu - s.spec.lambda(l, j);
            if (a > 0.0) {
                br.push_back(a);
                umax = std::max(umax, a);
                if (a - gap > 0.0)
                    br.push_back(a - gap);
            }
        }
        for (double e : extra_breaks) {
            if (e > 0.0) {
                br.push_back(e);
                umax = std::max(umax, e);
            }
        }
        if (umax == 0.0)
            umax = 1.0;
        br.push_back(umax);
        VelocityGrid vg = VelocityGrid::composite(br, kVelocityOrder);
        const Eigen::ArrayXd u = vg.energy();
        Eigen::ArrayXXd f(vg.size(), J);
        for (int j = 0; j < J; ++j)
            for (int i = 0; i < vg.size(); ++i)
                f(i, j) = beta_tilde(s.mu - u(i) - s.spec.lambda(l, j), m);
        p.vgrid.push_back(std::move(vg));
        p.f.push_back(std::move(f));
    }
    return p;
}

TestPair perturbed_pair(const EquilibriumState& s, const Grid& g, const OccupancyModel& m,
                        const Perturbation& q)
{
    const int J = s.spec.J;
    if (!(q.eps >= 0.0 && q.eps <= 1.0))
        throw InvalidArgument("perturbed_pair: eps must lie in [0, 1]");
    if (!(q.r1 > 0.0 && q.r2 > 0.0))
        throw InvalidArgument("perturbed_pair: lateral window must have positive width");
    std::vector<double> extra;
    if (q.kind != Perturbation::Kind::rotation) {
        if (q.band < 0 || q.band >= J || !(q.u1 > q.u0) || q.u0 < 0.0)
            throw InvalidArgument("perturbed_pair: bad bump description");
        if (!(q.target >= 0.0 && q.target <= 1.0))
            throw InvalidArgument("perturbed_pair: bump target must lie in [0, 1]");
        extra = {q.u0, q.u1};
    }
    if (q.kind == Perturbation::Kind::mass_preserving_bump) {
        if (q.band2 < 0 || q.band2 >= J || !(q.v1 > q.v0) || q.v0 < 0.0)
            throw InvalidArgument("perturbed_pair: bad compensating bump description");
        if (!(q.target2 >= 0.0 && q.target2 <= 1.0))
            throw InvalidArgument("perturbed_pair: bump target must lie in [0, 1]");
        extra.push_back(q.v0);
        extra.push_back(q.v1);
    }
    TestPair p = equilibrium_pair(s, g, m, extra);
    const int nl = g.lateral_size();

    if (q.kind == Perturbation::Kind::rotation) {
        if (q.band < 0 || q.band + 1 >= J)
            throw InvalidArgument("perturbed_pair: rotation needs bands j and j+1");
        Field3D& a = p.chi[q.band];
        Field3D& b = p.chi[q.band + 1];
        for (int l = 0; l < nl; ++l) {
            const double phi = q.eps * lateral_window(g, l, q);
            const Eigen::ArrayXd ca = a.col(l), cb = b.col(l);
            a.col(l) = std::cos(phi) * ca + std::sin(phi) * cb;
            b.col(l) = -std::sin(phi) * ca + std::cos(phi) * cb;
        }
        p.h = rayleigh_table(p.chi, s.U + s.vext, g);
        return p;
    }

    // Mass moved by each unit bump, used to balance the compensating bump.
    double d1 = 0.0, d2 = 0.0;
    for (int l = 0; l < nl; ++l) {
        const double A = lateral_window(g, l, q);
        if (A == 0.0)
            continue;
        const VelocityGrid& vg = p.vgrid_at(l);
        const Eigen::ArrayXd u = vg.energy();
        for (int i = 0; i < vg.size(); ++i) {
            d1 += vg.w(i) * A * speed_window(u(i), q.u0, q.u1) * (q.target - p.f[l](i, q.band));
            if (q.kind == Perturbation::Kind::mass_preserving_bump)
                d2 += vg.w(i) * A * speed_window(u(i), q.v0, q.v1) * (q.target2 - p.f[l](i, q.band2));
        }
    }
    double gamma = 0.0;
    if (q.kind == Perturbation::Kind::mass_preserving_bump && d2 != 0.0 && d1 * d2 < 0.0)
        gamma = -d1 / d2;
    // Convex combination of f*, target and target2 stays in [0, 1].
    if (q.eps > 0.0)
        gamma = std::min(gamma, 1.0 / q.eps - 1.0);

    for (int l = 0; l < nl; ++l) {
        const double A = lateral_window(g, l, q);
        if (A == 0.0)
            continue;
        const VelocityGrid& vg = p.vgrid_at(l);
        const Eigen::ArrayXd u = vg.energy();
        const Eigen::ArrayXXd f0 = p.f[l];
        for (int i = 0; i < vg.size(); ++i) {
            p.f[l](i, q.band) += q.eps * A * speed_window(u(i), q.u0, q.u1) * (q.target - f0(i, q.band));
            if (gamma > 0.0)
                p.f[l](i, q.band2) += gamma * q.eps * A * speed_window(u(i), q.v0, q.v1)
                                      * (q.target2 - f0(i, q.band2));
        }
        p.f[l] = p.f[l].max(0.0).min(1.0); // rounding only
    }
    return p;
}

std::vector<Perturbation> perturbation_family(const EquilibriumState& s, const Grid& g,
                                              std::uint64_t seed, int count,
                                              const std::vector<double>& eps_levels)
{
    if (eps_levels.empty())
        throw InvalidArgument("perturbation_family: no eps levels");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int J = s.spec.J;
    const int J_act = active_subband_count(s.spec, s.mu);
    const int top = std::min(J - 1, J_act); // first empty band included
    static const Perturbation::Kind pattern[5] = {
        Perturbation::Kind::bump, Perturbation::Kind::bump, Perturbation::Kind::mass_preserving_bump,
        Perturbation::Kind::rotation, Perturbation::Kind::bump};

    std::vector<Perturbation> out;
    out.reserve(count);
    for (int n = 0; n < count; ++n) {
        Perturbation q;
        q.kind = pattern[n % 5];
        const double eps = eps_levels[(n / 5) % eps_levels.size()];
        q.c1 = 0.3 + 0.4 * unif(rng);
        q.c2 = 0.3 + 0.4 * unif(rng);
        q.r1 = 0.2 + 0.25 * unif(rng);
        q.r2 = 0.2 + 0.25 * unif(rng);
        const int lc = nearest_node(g, q.c1, q.c2);
        const auto gap_at = [&](int j) { return s.mu - s.spec.lambda(lc, j); };
        q.band = static_cast<int>(unif(rng) * (top + 1)) % (top + 1);
        const double a = gap_at(q.band);
        const double a0 = gap_at(0);
        if (q.kind == Perturbation::Kind::mass_preserving_bump && a0 <= 0.1)
            q.kind = Perturbation::Kind::bump;
        switch (q.kind) {
        case Perturbation::Kind::bump:
            q.eps = eps;
            if (a <= 0.3 || unif(rng) < 0.5) {
                q.target = 0.5 + 0.5 * unif(rng);
                q.u0 = std::max(0.0, std::max(a, 0.0) - 0.5 * unif(rng));
                q.u1 = q.u0 + 0.5 + 1.5 * unif(rng);
            } else {
                q.target = 0.5 * unif(rng);
                q.u0 = 0.5 * a * unif(rng);
                q.u1 = q.u0 + (0.2 + 0.3 * unif(rng)) * a;
            }
            break;
        case Perturbation::Kind::mass_preserving_bump:
            q.eps = eps;
            q.band2 = 0;
            q.target2 = 0.0;
            q.v0 = 0.3 * a0 * unif(rng);
            q.v1 = q.v0 + 0.4 * a0;
            q.target = 1.0;
            q.u0 = std::max(a, 0.0) + 0.3 * unif(rng);
            q.u1 = q.u0 + 0.4 * a0;
            break;
        case Perturbation::Kind::rotation:
            q.eps = std::min(0.2, 2.0 * eps) * (0.5 + 0.5 * unif(rng));
            q.band = std::min(J - 2, static_cast<int>(unif(rng) * std::max(1, J_act)));
            break;
        }
        out.push_back(q);
    }
    return out;
}

WeightedL1Result check_weighted_l1(const TestPair& p, const Field3D& vext, const Grid& g,
                                   const OccupancyModel& m, const PoissonOptions& popt)
{
    p.validate(g);
    if (p.has_labels() || !is_energy_sorted(p, g))
        throw PreconditionViolation(
            "check_weighted_l1: pair must have nondecreasing z-kinetic energies on every slice");
    const Eigen::ArrayXd mj = band_masses(p, g);
    const Eigen::ArrayXXd kz = z_kinetic_table(p.chi, g);
    WeightedL1Result r;
    double kin = 0.0;
    for (int j = 0; j < p.J; ++j) {
        r.weighted_mass += double(j + 1) * double(j + 1) * mj(j);
        double acc = 0.0;
        for (int l = 0; l < g.lateral_size(); ++l)
            acc += kz(l, j) * (p.vgrid_at(l).w * p.f[l].col(j)).sum();
        kin += acc * g.lateral_weight();
    }
    r.kinetic_bound = 3.0 / (kPi * kPi) * kin;
    const PairFunctionals pf = pair_functionals(p, vext, g, m, popt);
    r.energy_bound = 6.0 / (kPi * kPi) * pf.free_energy;
    r.pass_lower = r.weighted_mass <= r.kinetic_bound * (1.0 + 1e-6);
    r.pass_upper = r.kinetic_bound <= r.energy_bound * (1.0 + 1e-6);
    return r;
}

InterpolationResult check_kinetic_interpolation(const TestPair& p, double s, const Field3D& vext,
                                                const Grid& g, const OccupancyModel& m,
                                                const PoissonOptions& popt)
{
    if (!(s >= 1.0 && s < 3.0))
        throw InvalidArgument("check_kinetic_interpolation: s must lie in [1, 3)");
    p.validate(g);
    InterpolationResult r;
    r.s = s;
    const PairFunctionals pf = pair_functionals(p, vext, g, m, popt);
    r.mass = pf.mass;
    const double q = (5.0 * s - 3.0) / (3.0 * s - 1.0);
    r.density_norm = std::pow(integrate_volume(pf.rho.abs().pow(q).eval(), g), 1.0 / q);

    const Eigen::ArrayXXd kz = z_kinetic_table(p.chi, g);
    const double wl = g.lateral_weight();
    Eigen::ArrayXd Ls = Eigen::ArrayXd::Zero(p.J);
    double v2 = 0.0, kzf = 0.0;
    for (int l = 0; l < g.lateral_size(); ++l) {
        const VelocityGrid& vg = p.vgrid_at(l);
        const Eigen::ArrayXd u = vg.energy();
        for (int i = 0; i < vg.size(); ++i)
            for (int j = 0; j < p.J; ++j) {
                const double fv = p.f[l](i, j);
                Ls(j) += wl * vg.w(i) * std::pow(fv, s);
                v2 += wl * vg.w(i) * 2.0 * u(i) * fv;
                kzf += wl * vg.w(i) * kz(l, p.label(l, i, j)) * fv;
            }
    }
    const Eigen::ArrayXd mj = band_masses(p, g);
    double weighted = 0.0;
    for (int j = 0; j < p.J; ++j) {
        r.holder_lhs += std::pow(Ls(j), 1.0 / s);
        weighted += double(j + 1) * double(j + 1) * mj(j);
    }
    const double d = 5.0 * s - 3.0;
    r.rhs_kinetic = std::pow(r.holder_lhs, 2.0 * s / d) * std::pow(v2, 2.0 * (s - 1.0) / d)
                    * std::pow(kzf, (s - 1.0) / d);
    r.rhs_upgraded = std::pow(weighted, 2.0 / d) * std::pow(pf.free_energy, 3.0 * (s - 1.0) / d);
    r.ratio_kinetic = safe_ratio(r.density_norm, r.rhs_kinetic);
    r.ratio_upgraded = safe_ratio(r.density_norm, r.rhs_upgraded);

    if (s == 1.0) {
        r.holder_rhs = weighted;
    } else {
        double zeta = 0.0;
        for (int j = 1; j <= p.J; ++j)
            zeta += std::pow(double(j), -2.0 / (s - 1.0));
        r.holder_rhs = std::pow(zeta, (s - 1.0) / s) * std::pow(weighted, 1.0 / s);
    }
    r.holder_pass = r.holder_lhs <= r.holder_rhs * (1.0 + 1e-12);
    return r;
}

CoercivityResult check_coercivity(const EquilibriumState& base, const TestPair& pert, const Grid& g,
                                  const OccupancyModel& m, const PoissonOptions& popt)
{
    base.spec.require(g, "check_coercivity");
    pert.validate(g);
    if (pert.J != base.spec.J)
        throw DimensionMismatch("check_coercivity: perturbation must carry the base band count");
    const PairFunctionals pf = pair_functionals(pert, base.vext, g, m, popt);
    const TestPair sorted = rearrange_occupation_decreasing(pert);
    const double T = m.temperature();

    double lin = 0.0;
    for (int l = 0; l < g.lateral_size(); ++l) {
        const VelocityGrid& vg = sorted.vgrid_at(l);
        const Eigen::ArrayXd u = vg.energy();
        double acc = 0.0;
        for (int i = 0; i < vg.size(); ++i)
            for (int j = 0; j < pert.J; ++j) {
                const double lam = base.spec.lambda(l, j);
                const double fs = beta_tilde(base.mu - u(i) - lam, m);
                const double tb = T > 0.0 ? T * m.beta_prime(fs) : 0.0;
                acc += vg.w(i) * (u(i) + lam + tb) * (sorted.f[l](i, j) - fs);
            }
        lin += acc;
    }
    lin *= g.lateral_weight();

    CoercivityResult r;
    r.U_pert = pf.U;
    r.dirichlet_gap = 0.5 * dirichlet_energy((pf.U - base.U).eval(), g);
    r.lhs = pf.free_energy - base.energy.total_direct;
    r.rhs = r.dirichlet_gap + lin;
    r.coercive = r.lhs >= r.rhs - 1e-6 * (1.0 + std::abs(r.lhs));
    r.mass_change = pf.mass - base_mass(base, g);
    r.delta = std::abs(r.lhs) + base.mu * std::abs(r.mass_change);
    r.stability_bound = (1.0 + base.mu) * r.delta;
    r.stable = r.dirichlet_gap <= r.stability_bound * (1.0 + 1e-6);
    return r;
}

CheckResult check_mu_bound(const EquilibriumState& s, double M, const OccupancyModel& m)
{
    const double bound = 4.0 / M * (s.energy.total_direct + m.saturation_gap() * M);
    return make_check("mu_bound", s.mu, bound, s.mu > 0.0 && s.mu <= bound * (1.0 + 1e-9));
}

std::vector<CheckResult> check_uniqueness(const std::vector<EquilibriumState>& states, const Grid& g)
{
    std::vector<CheckResult> out;
    for (std::size_t a = 0; a < states.size(); ++a)
        for (std::size_t b = a + 1; b < states.size(); ++b) {
            const double d = std::sqrt(dirichlet_energy((states[a].U - states[b].U).eval(), g));
            const double n = std::sqrt(dirichlet_energy(states[a].U, g));
            const double tol = 1e-6 * (1.0 + n);
            out.push_back(make_check("uniqueness[" + std::to_string(a) + "," + std::to_string(b) + "]", d,
                                     tol, d <= tol));
        }
    return out;
}

std::vector<CheckResult> check_uniqueness(const SolverConfig& cfg, const std::vector<InitialPotential>& inits)
{
    std::vector<EquilibriumState> states;
    for (const auto& init : inits) {
        SolverConfig c = cfg;
        c.init = init;
        states.push_back(solve_equilibrium(c).state);
    }
    return check_uniqueness(states, cfg.grid);
}

CheckResult check_schrodinger_stability(const Field3D& W1, const Field3D& W2, int J, const Grid& g)
{
    g.require_3d(W1, "check_schrodinger_stability");
    g.require_3d(W2, "check_schrodinger_stability");
    const int n = g.interior_z_size();
    double worst_ratio = 0.0, worst_excess = -std::numeric_limits<double>::infinity(), lam_scale = 0.0;
    for (int l = 0; l < g.lateral_size(); ++l) {
        const Eigen::ArrayXd w1 = W1.col(l).segment(1, n), w2 = W2.col(l).segment(1, n);
        const double dinf = (w1 - w2).abs().maxCoeff();
        const SliceEigenpairs a = solve_slice(w1, J, g);
        const Eigen::ArrayXd gaps = eigenvalue_stability_gap(w1, w2, J, g);
        lam_scale = std::max(lam_scale, a.lambda.abs().maxCoeff());
        worst_excess = std::max(worst_excess, gaps.maxCoeff() - dinf);
        if (dinf > 0.0)
            worst_ratio = std::max(worst_ratio, gaps.maxCoeff() / dinf);
    }
    const double tol = 1e-10 * (1.0 + lam_scale);
    CheckResult c = make_check("schrodinger_stability", worst_ratio, 1.0, worst_excess <= tol);
    return c;
}

VerifyReport run_verification(const SolverConfig& cfg_in, const VerifyOptions& opt)
{
    if (opt.n_pairs < 0 || opt.n_perturbations < 0)
        throw InvalidArgument("verify: counts must be nonnegative");
    VerifyReport rep;
    rep.seed = opt.seed;
    const Grid& g = cfg_in.grid;
    const OccupancyModel& model = cfg_in.model;
    const double M = cfg_in.M_target;

    double worst_weak = 0.0;
    SolverConfig cfg = cfg_in;
    auto user_observer = cfg_in.poisson.observer;
    cfg.poisson.observer = [&](const Field3D& rho, const Field3D& U) {
        const double e = dirichlet_energy(U, g);
        const double p = potential_pairing(U, rho, g);
        if (e > 0.0)
            worst_weak = std::max(worst_weak, std::abs(p - e) / e);
        if (user_observer)
            user_observer(rho, U);
    };
    PoissonOptions pair_poisson;
    pair_poisson.method = PoissonMethod::spectral;
    pair_poisson.observer = cfg.poisson.observer;

    // Equilibrium and its structural properties.
    const EquilibriumResult res = solve_equilibrium(cfg);
    const EquilibriumState& st = res.state;
    {
        const double mass = base_mass(st, g);
        rep.checks.push_back(make_check("equilibrium_mass", std::abs(mass - M), 1e-8 * M,
                                        std::abs(mass - M) <= 1e-8 * M));
        Field3D rebuilt = g.zeros_3d();
        for (int j = 0; j < st.spec.J; ++j)
            for (int l = 0; l < g.lateral_size(); ++l)
                rebuilt.col(l) += st.rho_j[j](l) * st.spec.chi[j].col(l).square();
        const double dev = (rebuilt - st.rho).abs().maxCoeff();
        const double tol = 1e-12 * std::max(1.0, st.rho.abs().maxCoeff());
        rep.checks.push_back(make_check("density_assembly", dev, tol, dev <= tol));
        const auto& e = st.energy;
        const double tol_e = 1e-6 * (1.0 + std::abs(e.total_direct));
        rep.checks.push_back(make_check("free_energy_routes", std::abs(e.total_primal - e.total_direct), tol_e,
                                        std::abs(e.total_primal - e.total_direct) <= tol_e));
        rep.checks.push_back(make_check("fixed_point_residual", st.residual, cfg.fp_tol, st.residual <= cfg.fp_tol));
        const SubbandCount sc = check_active_subbands(st);
        rep.checks.push_back(make_check("finite_subbands", sc.J_active, sc.bound, sc.pass));
        const double gap = min_spectral_gap(st.spec);
        rep.checks.push_back(make_check("spectrum_increasing", 1e-10, gap, gap > 1e-10));
        rep.checks.push_back(check_mu_bound(st, M, model));
        // F nonincreasing along accepted steps, up to a rounding slack.
        double worst_rise = -std::numeric_limits<double>::infinity(), slack_at = 0.0;
        bool mono = true;
        for (std::size_t k = 1; k < res.trace.size(); ++k) {
            const double rise = res.trace[k].F - res.trace[k - 1].F;
            const double slack = 1e-12 * (1.0 + std::abs(res.trace[k - 1].F));
            if (rise > slack)
                mono = false;
            if (rise > worst_rise) {
                worst_rise = rise;
                slack_at = slack;
            }
        }
        if (res.trace.size() < 2)
            worst_rise = 0.0;
        rep.checks.push_back(make_check("free_energy_monotone", worst_rise, slack_at, mono));
    }

    // Uniqueness of the potential across initializations.
    {
        std::vector<EquilibriumState> states{st};
        for (int k = 1; k <= 2; ++k) {
            SolverConfig c = cfg;
            c.init.kind = InitialPotential::Kind::random_smooth;
            c.init.seed = opt.seed + k;
            states.push_back(solve_equilibrium(c).state);
        }
        for (auto& c : check_uniqueness(states, g))
            rep.checks.push_back(std::move(c));
    }

    // Randomized admissible pairs.
    std::mt19937_64 rng(opt.seed);
    std::vector<double> r_kin, r_up;
    for (int n = 0; n < opt.n_pairs; ++n) {
        const TestPair raw = random_test_pair(g, st.vext, opt.pair_bands, rng);
        if (opt.unsorted_weighted_l1_pair && n == 0) {
            TestPair rev = rearrange_energy_increasing(raw, g);
            std::reverse(rev.chi.begin(), rev.chi.end());
            for (auto& f : rev.f)
                f = f.rowwise().reverse().eval();
            check_weighted_l1(rev, st.vext, g, model, pair_poisson); // throws
        }
        const TestPair up = rearrange_energy_increasing(raw, g);
        const TestPair down = rearrange_occupation_decreasing(up);
        const std::string tag = "[" + std::to_string(n) + "]";

        const WeightedL1Result w = check_weighted_l1(up, st.vext, g, model, pair_poisson);
        rep.checks.push_back(make_check("weighted_l1_kinetic" + tag, w.weighted_mass, w.kinetic_bound, w.pass_lower));
        rep.checks.push_back(make_check("weighted_l1_energy" + tag, w.kinetic_bound, w.energy_bound, w.pass_upper));

        const InterpolationResult ir = check_kinetic_interpolation(up, opt.interpolation_s, st.vext, g, model,
                                                                   pair_poisson);
        r_kin.push_back(ir.ratio_kinetic);
        r_up.push_back(ir.ratio_upgraded);
        rep.checks.push_back(make_check("holder_step" + tag, ir.holder_lhs, ir.holder_rhs, ir.holder_pass));
        if (n == 0) {
            const InterpolationResult i1 = check_kinetic_interpolation(up, 1.0, st.vext, g, model, pair_poisson);
            rep.checks.push_back(make_check("interpolation_s1_mass", i1.density_norm, i1.mass,
                                            close_rel(i1.density_norm, i1.mass, 1e-12)));
        }

        // Invariance under both rearrangements, and idempotence.
        const PairFunctionals a = pair_functionals(raw, st.vext, g, model, pair_poisson);
        const PairFunctionals b = pair_functionals(up, st.vext, g, model, pair_poisson);
        const PairFunctionals c = pair_functionals(down, st.vext, g, model, pair_poisson);
        const double rho_scale = std::max(1.0, a.rho.abs().maxCoeff());
        const double drho = std::max((a.rho - b.rho).abs().maxCoeff(), (a.rho - c.rho).abs().maxCoeff());
        const bool inv = close_rel(a.mass, b.mass, 1e-12) && close_rel(a.mass, c.mass, 1e-12)
                         && close_rel(a.casimir, b.casimir, 1e-12) && close_rel(a.casimir, c.casimir, 1e-12)
                         && close_rel(a.free_energy, b.free_energy, 1e-12)
                         && close_rel(a.free_energy, c.free_energy, 1e-12) && drho <= 1e-12 * rho_scale;
        const double dF = std::max(std::abs(a.free_energy - b.free_energy), std::abs(a.free_energy - c.free_energy));
        rep.checks.push_back(make_check("rearrangement_invariance" + tag, dF, 1e-12 * std::max(1.0, std::abs(a.free_energy)),
                                        inv));
        const TestPair up2 = rearrange_energy_increasing(up, g);
        const TestPair down2 = rearrange_occupation_decreasing(down);
        bool idem = true;
        for (int l = 0; l < g.lateral_size() && idem; ++l) {
            idem = (up2.f[l] == up.f[l]).all() && (down2.f[l] == down.f[l]).all()
                   && (down2.labels[l] == down.labels[l]).all();
        }
        for (int j = 0; j < up.J && idem; ++j)
            idem = (up2.chi[j] == up.chi[j]).all();
        rep.checks.push_back(make_check("rearrangement_idempotent" + tag, idem ? 0.0 : 1.0, 0.0, idem));
    }
    if (opt.n_pairs > 0) {
        add_monitor(rep, "kinetic_interpolation_ratio", r_kin);
        add_monitor(rep, "upgraded_density_ratio", r_up);
    }

    // Coercivity and static stability around the equilibrium.
    const auto family = perturbation_family(st, g, opt.seed, opt.n_perturbations, opt.eps_levels);
    const Field3D W_base = st.U + st.vext;
    for (std::size_t n = 0; n < family.size(); ++n) {
        const TestPair pert = perturbed_pair(st, g, model, family[n]);
        const CoercivityResult cr = check_coercivity(st, pert, g, model, pair_poisson);
        const std::string tag = "[" + std::to_string(n) + "]";
        rep.checks.push_back(make_check("coercivity" + tag, cr.lhs, cr.rhs, cr.coercive));
        rep.checks.push_back(make_check("stability_gap" + tag, cr.dirichlet_gap, cr.stability_bound, cr.stable));
        if (n % 10 == 0) {
            CheckResult sc = check_schrodinger_stability(W_base, cr.U_pert + st.vext, st.spec.J, g);
            sc.name += tag;
            rep.checks.push_back(std::move(sc));
        }
    }

    // Shrinking perturbations: the stability ratio per level.
    {
        std::vector<Perturbation> shapes;
        for (const auto& q : perturbation_family(st, g, opt.seed + 1000, 10, {1.0}))
            if (q.kind != Perturbation::Kind::rotation)
                shapes.push_back(q);
        for (double eps : opt.stability_levels) {
            std::vector<double> ratios;
            for (std::size_t k = 0; k < shapes.size(); ++k) {
                Perturbation q = shapes[k];
                q.eps = eps;
                const CoercivityResult cr = check_coercivity(st, perturbed_pair(st, g, model, q), g, model,
                                                             pair_poisson);
                char buf[64];
                std::snprintf(buf, sizeof buf, "stability_level[%.0e][%zu]", eps, k);
                rep.checks.push_back(make_check(buf, cr.dirichlet_gap, cr.stability_bound, cr.stable));
                ratios.push_back(safe_ratio(cr.dirichlet_gap, cr.stability_bound));
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "stability_ratio[%.0e]", eps);
            MonitorResult mr;
            mr.name = buf;
            mr.count = static_cast<int>(ratios.size());
            mr.min_ratio = ratios.empty() ? 0.0 : *std::min_element(ratios.begin(), ratios.end());
            mr.max_ratio = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
            mr.pass = std::all_of(ratios.begin(), ratios.end(), [](double r) { return std::isfinite(r); });
            rep.monitors.push_back(mr);
        }
    }

    rep.checks.push_back(make_check("poisson_weak_form", worst_weak, 1e-8, worst_weak <= 1e-8));
    return rep;
}

} // namespace subband
