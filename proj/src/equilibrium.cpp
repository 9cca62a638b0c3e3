#include "subband/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace subband {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Evaluation {
    SubbandSpectrum spec;
    double mu = 0.0;
    DensityAssembly density;
    Field3D U_hat;
    FreeEnergyBreakdown energy;
};

int cap_bands(int J, const Grid& g) { return std::min(J, g.interior_z_size()); }

Evaluation evaluate(const Field3D& U, const Field3D& vext, const SolverConfig& cfg, double mu_estimate,
                    const Field3D* warm)
{
    const Grid& g = cfg.grid;
    const Field3D W = U + vext;
    Evaluation ev;
    int J = cap_bands(choose_J_max(mu_estimate, cfg.J_margin), g);
    for (;;) {
        ev.spec = compute_spectrum(W, J, g);
        ev.mu = solve_mu(cfg.M_target, ev.spec, g, cfg.model);
        // The top computed band must be empty everywhere, else the band set is truncated.
        if (ev.spec.lambda.col(J - 1).minCoeff() > ev.mu || J == g.interior_z_size())
            break;
        J = cap_bands(J + std::max(2, cfg.J_margin), g);
    }
    if (ev.spec.lambda.col(J - 1).minCoeff() <= ev.mu)
        throw PreconditionViolation("solve_equilibrium: chemical potential exceeds the resolved z-spectrum");
    ev.density = assemble_density(ev.spec, ev.mu, cfg.model, g);
    if (cfg.self_consistent)
        ev.U_hat = solve_poisson(ev.density.rho, g, cfg.poisson, warm);
    else
        ev.U_hat = g.zeros_3d();
    ev.energy = free_energy(ev.spec, ev.mu, ev.density.rho_j, ev.density.rho, ev.U_hat, vext, g, cfg.model);
    return ev;
}

} // namespace

ExternalPotential ExternalPotential::z_well(double c)
{
    ExternalPotential v;
    v.kind = Kind::z_well;
    v.strength = c;
    return v;
}

Field3D ExternalPotential::sample(const Grid& g) const
{
    Field3D V = g.zeros_3d();
    if (strength < 0.0)
        throw InvalidArgument("external potential strength must be nonnegative");
    switch (kind) {
    case Kind::zero:
        break;
    case Kind::z_well:
        for (int l = 0; l < g.lateral_size(); ++l)
            for (int k = 0; k <= g.nz(); ++k)
                V(k, l) = strength * g.z(k) * (1.0 - g.z(k));
        break;
    case Kind::lateral_bump:
        if (!(width > 0.0))
            throw InvalidArgument("lateral bump width must be positive");
        for (int l = 0; l < g.lateral_size(); ++l) {
            const double d1 = g.y1(g.i1_of(l)) - center1;
            const double d2 = g.y2(g.i2_of(l)) - center2;
            V.col(l).setConstant(strength * std::exp(-(d1 * d1 + d2 * d2) / (width * width)));
        }
        break;
    }
    return V;
}

Field3D InitialPotential::sample(const Grid& g) const
{
    switch (kind) {
    case Kind::zero:
        return g.zeros_3d();
    case Kind::supplied:
        g.require_3d(values, "supplied initial potential");
        if (!values.allFinite())
            throw InvalidArgument("supplied initial potential is not finite");
        return values;
    case Kind::random_smooth:
        break;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Field3D U = g.zeros_3d();
    for (int m1 = 1; m1 <= 3; ++m1) {
        for (int m2 = 1; m2 <= 3; ++m2) {
            for (int mz = 0; mz <= 2; ++mz) {
                const double c = amplitude * coef(rng) / (m1 * m2 * (1 + mz));
                for (int l = 0; l < g.lateral_size(); ++l) {
                    const double s = std::sin(kPi * m1 * g.y1(g.i1_of(l)) / g.L1())
                                     * std::sin(kPi * m2 * g.y2(g.i2_of(l)) / g.L2());
                    for (int k = 0; k <= g.nz(); ++k)
                        U(k, l) += c * s * std::cos(kPi * mz * g.z(k));
                }
            }
        }
    }
    return U;
}

void SolverConfig::validate() const
{
    if (!(M_target > 0.0) || !std::isfinite(M_target))
        throw InvalidArgument("M_target must be positive");
    if (!(theta > 0.0 && theta <= 1.0))
        throw InvalidArgument("theta must lie in (0, 1]");
    if (!(fp_tol > 0.0))
        throw InvalidArgument("fp_tol must be positive");
    if (max_outer < 1)
        throw InvalidArgument("max_outer must be at least 1");
    if (J_margin < 0)
        throw InvalidArgument("J_margin must be nonnegative");
    if (!(poisson.rel_tol > 0.0))
        throw InvalidArgument("poisson tolerance must be positive");
    if (model.temperature() < 0.0)
        throw InvalidArgument("temperature must be nonnegative");
}

DensityAssembly assemble_density(const SubbandSpectrum& spec, double mu, const OccupancyModel& m,
                                 const Grid& g)
{
    spec.require(g, "assemble_density");
    DensityAssembly out;
    out.rho = g.zeros_3d();
    out.rho_j.reserve(spec.J);
    for (int j = 0; j < spec.J; ++j) {
        Field2D r(g.lateral_size());
        for (int l = 0; l < g.lateral_size(); ++l)
            r(l) = 2.0 * kPi * profile_G(mu - spec.lambda(l, j), m);
        for (int l = 0; l < g.lateral_size(); ++l)
            out.rho.col(l) += r(l) * spec.chi[j].col(l).square();
        out.rho_j.push_back(std::move(r));
    }
    return out;
}

FreeEnergyBreakdown free_energy(const SubbandSpectrum& spec, double mu,
                                const std::vector<Field2D>& rho_j, const Field3D& rho,
                                const Field3D& U, const Field3D& vext, const Grid& g,
                                const OccupancyModel& m)
{
    spec.require(g, "free_energy");
    g.require_3d(rho, "free_energy rho");
    g.require_3d(U, "free_energy U");
    g.require_3d(vext, "free_energy vext");
    if (static_cast<int>(rho_j.size()) != spec.J)
        throw DimensionMismatch("free_energy: one band density per subband required");
    FreeEnergyBreakdown e;
    const double T = m.temperature();
    const double wl = g.lateral_weight();
    for (int j = 0; j < spec.J; ++j) {
        g.require_2d(rho_j[j], "free_energy rho_j");
        double kin = 0.0, band = 0.0, cas = 0.0, qk = 0.0;
        for (int l = 0; l < g.lateral_size(); ++l) {
            const double a = mu - spec.lambda(l, j);
            kin += 2.0 * kPi * profile_K(a, m);
            band += spec.lambda(l, j) * rho_j[j](l);
            if (T > 0.0)
                cas += 2.0 * kPi * profile_B(a, m);
            if (rho_j[j](l) != 0.0)
                qk += 0.5 * z_kinetic_energy(spec.chi[j].col(l), g) * rho_j[j](l);
        }
        e.kinetic_v += kin * wl;
        e.band_energy += band * wl;
        e.casimir += T * cas * wl;
        e.quantum_kinetic += qk * wl;
    }
    e.field_energy = 0.5 * dirichlet_energy(U, g);
    e.vext_pairing = inner_volume(vext, rho, g);
    e.total_primal = e.kinetic_v + e.band_energy - e.field_energy + e.casimir;
    e.total_direct = e.kinetic_v + e.quantum_kinetic + e.vext_pairing + e.field_energy + e.casimir;
    return e;
}

FreeEnergyBreakdown free_energy(const EquilibriumState& s, const Grid& g, const OccupancyModel& m)
{
    return free_energy(s.spec, s.mu, s.rho_j, s.rho, s.U, s.vext, g, m);
}

int choose_J_max(double mu_estimate, int margin)
{
    if (!std::isfinite(mu_estimate))
        throw InvalidArgument("choose_J_max: non-finite estimate");
    const double b = std::sqrt(3.0 * std::max(mu_estimate, 0.0)) / kPi;
    return std::max(4, static_cast<int>(std::ceil(b)) + margin);
}

int active_subband_count(const SubbandSpectrum& spec, double mu)
{
    int n = 0;
    for (int j = 0; j < spec.J; ++j)
        if ((mu - spec.lambda.col(j)).maxCoeff() > 0.0)
            ++n;
    return n;
}

SubbandCount check_active_subbands(const EquilibriumState& s)
{
    SubbandCount c;
    c.J_active = active_subband_count(s.spec, s.mu);
    c.bound = std::sqrt(3.0 * std::max(s.mu, 0.0)) / kPi + 1.0;
    c.pass = c.J_active < c.bound;
    return c;
}

double min_spectral_gap(const SubbandSpectrum& spec)
{
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < spec.J; ++j)
        gap = std::min(gap, (spec.lambda.col(j + 1) - spec.lambda.col(j)).minCoeff());
    return gap;
}

EquilibriumResult solve_equilibrium(const SolverConfig& cfg)
{
    cfg.validate();
    const Grid& g = cfg.grid;
    const Field3D vext = cfg.vext.sample(g);
    Field3D U = cfg.self_consistent ? cfg.init.sample(g) : g.zeros_3d();

    IterationTrace trace;
    Evaluation ev = evaluate(U, vext, cfg, 0.0, nullptr);
    double theta = cfg.theta;
    double theta_used = cfg.theta;
    constexpr double kThetaFloor = 1.0 / 1024.0;

    for (int iter = 1;; ++iter) {
        const double residual = l2_norm(ev.U_hat - U, g) / (1.0 + l2_norm(U, g));
        TraceRow row;
        row.iter = iter;
        row.residual = residual;
        row.mu = ev.mu;
        row.J_active = active_subband_count(ev.spec, ev.mu);
        row.F = ev.energy.total_direct;
        row.theta = theta_used;
        trace.push_back(row);

        if (residual <= cfg.fp_tol) {
            EquilibriumResult out;
            EquilibriumState& s = out.state;
            s.mu = ev.mu;
            s.spec = std::move(ev.spec);
            s.U = std::move(ev.U_hat);
            s.vext = vext;
            s.rho = std::move(ev.density.rho);
            s.rho_j = std::move(ev.density.rho_j);
            s.energy = ev.energy;
            s.residual = residual;
            s.iterations = iter;
            out.trace = std::move(trace);
            return out;
        }
        if (iter >= cfg.max_outer)
            throw EquilibriumNonConvergence("solve_equilibrium: no convergence within "
                                                + std::to_string(cfg.max_outer)
                                                + " outer iterations (last residual "
                                                + std::to_string(residual) + ")",
                                            std::move(trace));

        // Damped step with halving whenever the free energy would increase.
        const double F = ev.energy.total_direct;
        const double slack = 1e-12 * (1.0 + std::abs(F));
        for (;;) {
            Field3D U_try = (1.0 - theta) * U + theta * ev.U_hat;
            Evaluation trial = evaluate(U_try, vext, cfg, ev.mu, &ev.U_hat);
            if (trial.energy.total_direct <= F + slack || theta <= kThetaFloor) {
                U = std::move(U_try);
                ev = std::move(trial);
                theta_used = theta;
                theta = std::min(cfg.theta, 2.0 * theta);
                break;
            }
            theta *= 0.5;
        }
    }
}

} // namespace subband
