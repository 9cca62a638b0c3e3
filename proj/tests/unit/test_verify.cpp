#include <doctest.h>

#include <cmath>
#include <random>

#include "subband/rearrange.hpp"
#include "subband/verify.hpp"
#include "support.hpp"

using namespace subband;
using testing_support::small_config;

namespace {
const double pi = 3.14159265358979323846;

TestPair ground_band_pair(const Grid& g, double c)
{
    TestPair p;
    p.J = 1;
    p.vgrid = {VelocityGrid::composite({0.0, 1.0, 3.0}, 4)};
    Field3D chi = g.zeros_3d();
    for (int k = 1; k < g.nz(); ++k)
        chi.row(k).setConstant(std::sqrt(2.0) * std::sin(pi * g.z(k)));
    p.chi = {chi};
    p.h = rayleigh_table(p.chi, g.zeros_3d(), g);
    for (int l = 0; l < g.lateral_size(); ++l)
        p.f.push_back(Eigen::ArrayXXd::Constant(p.vgrid[0].size(), 1, c));
    return p;
}

struct Solved {
    SolverConfig cfg;
    EquilibriumState state;
};

const Solved& solved(double T)
{
    static Solved cold{small_config(0.0), {}}, warm{small_config(0.2), {}};
    Solved& s = T == 0.0 ? cold : warm;
    if (s.state.iterations == 0)
        s.state = solve_equilibrium(s.cfg).state;
    return s;
}
} // namespace

TEST_CASE("weighted l1 bound on a single ground band")
{
    Grid g(3, 3, 64);
    const OccupancyModel m;
    const TestPair p = ground_band_pair(g, 0.5);
    const WeightedL1Result r = check_weighted_l1(p, g.zeros_3d(), g, m);
    const double mass = band_masses(p, g)(0);
    // ||f||_1 = 0.5 * (2 pi * 3) * area
    CHECK(mass == doctest::Approx(0.5 * 2.0 * pi * 3.0 * g.area()).epsilon(1e-12));
    const double h = g.hz();
    const double d1 = 4.0 * std::sin(0.5 * pi * h) * std::sin(0.5 * pi * h) / (h * h);
    CHECK(r.weighted_mass == doctest::Approx(mass).epsilon(1e-12));
    CHECK(r.kinetic_bound == doctest::Approx(3.0 / (pi * pi) * d1 * mass).epsilon(1e-10));
    CHECK(r.kinetic_bound / mass == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(r.pass_lower);
    CHECK(r.pass_upper);

    const WeightedL1Result z = check_weighted_l1(ground_band_pair(g, 0.0), g.zeros_3d(), g, m);
    CHECK(z.weighted_mass == 0.0);
    CHECK(z.kinetic_bound == 0.0);
    CHECK(z.energy_bound == 0.0);
    CHECK(z.pass_lower);
}

TEST_CASE("weighted l1 rejects unsorted or labelled pairs")
{
    Grid g(3, 3, 32);
    std::mt19937_64 rng(3);
    const TestPair p = rearrange_energy_increasing(random_test_pair(g, g.zeros_3d(), 3, rng), g);
    TestPair rev = p;
    std::reverse(rev.chi.begin(), rev.chi.end());
    for (int l = 0; l < g.lateral_size(); ++l) {
        rev.f[l] = p.f[l].rowwise().reverse().eval();
        rev.h.row(l) = p.h.row(l).reverse();
    }
    CHECK_THROWS_AS(check_weighted_l1(rev, g.zeros_3d(), g, OccupancyModel{}), PreconditionViolation);
    CHECK_THROWS_AS(check_weighted_l1(rearrange_occupation_decreasing(p), g.zeros_3d(), g, OccupancyModel{}),
                    PreconditionViolation);
}

TEST_CASE("random pairs satisfy the weighted l1 chain and the Holder step")
{
    Grid g(6, 5, 48);
    std::mt19937_64 rng(11);
    const Field3D W = ExternalPotential::z_well(8.0).sample(g);
    for (double T : {0.0, 0.2}) {
        const OccupancyModel m = OccupancyModel::power(T, 2.0);
        for (int t = 0; t < 8; ++t) {
            const TestPair p = rearrange_energy_increasing(random_test_pair(g, W, 4, rng), g);
            const WeightedL1Result w = check_weighted_l1(p, W, g, m);
            CHECK(w.pass_lower);
            CHECK(w.pass_upper);
            for (double s : {1.0, 1.5, 2.0, 2.5}) {
                const TestPair q = rearrange_occupation_decreasing(p);
                const InterpolationResult ir = check_kinetic_interpolation(q, s, W, g, m);
                CHECK(ir.holder_pass);
                CHECK(std::isfinite(ir.ratio_kinetic));
                CHECK(std::isfinite(ir.ratio_upgraded));
                if (s == 1.0) {
                    CHECK(ir.density_norm == doctest::Approx(ir.mass).epsilon(1e-12));
                }
            }
        }
    }
    std::mt19937_64 r2(1);
    const TestPair p = random_test_pair(g, W, 3, r2);
    CHECK_THROWS_AS(check_kinetic_interpolation(p, 3.0, W, g, OccupancyModel{}), InvalidArgument);
    CHECK_THROWS_AS(check_kinetic_interpolation(p, 0.5, W, g, OccupancyModel{}), InvalidArgument);
}

TEST_CASE("coercivity at the equilibrium itself is tight")
{
    for (double T : {0.0, 0.2}) {
        const Solved& s = solved(T);
        const Grid& g = s.cfg.grid;
        const TestPair base = equilibrium_pair(s.state, g, s.cfg.model);
        const CoercivityResult c = check_coercivity(s.state, base, g, s.cfg.model);
        const double scale = 1.0 + std::abs(s.state.energy.total_direct);
        CHECK(std::abs(c.lhs) <= 1e-7 * scale);
        CHECK(std::abs(c.rhs) <= 1e-7 * scale);
        CHECK(std::abs(c.mass_change) <= 1e-8);
        CHECK(c.coercive);
        CHECK(c.stable);
    }
}

TEST_CASE("perturbations satisfy coercivity and stability")
{
    for (double T : {0.0, 0.2}) {
        const Solved& s = solved(T);
        const Grid& g = s.cfg.grid;
        const auto fam = perturbation_family(s.state, g, 5, 15, {1e-1, 1e-2});
        REQUIRE(fam.size() == 15);
        int kinds[3] = {0, 0, 0};
        for (const Perturbation& pe : fam) {
            ++kinds[static_cast<int>(pe.kind)];
            const TestPair p = perturbed_pair(s.state, g, s.cfg.model, pe);
            p.validate(g);
            const CoercivityResult c = check_coercivity(s.state, p, g, s.cfg.model);
            CHECK(c.coercive);
            CHECK(c.stable);
            CHECK(c.lhs >= -1e-7 * (1.0 + std::abs(s.state.energy.total_direct)));
            if (pe.kind == Perturbation::Kind::mass_preserving_bump) {
                CHECK(std::abs(c.mass_change) <= 1e-9);
            }
        }
        CHECK(kinds[0] > 0);
        CHECK(kinds[1] > 0);
        CHECK(kinds[2] > 0);
        // families are deterministic in the seed
        const auto again = perturbation_family(s.state, g, 5, 15, {1e-1, 1e-2});
        for (std::size_t i = 0; i < fam.size(); ++i) {
            CHECK(fam[i].eps == again[i].eps);
            CHECK(fam[i].c1 == again[i].c1);
        }
    }
}

TEST_CASE("stability gap shrinks with the perturbation size")
{
    const Solved& s = solved(0.2);
    const Grid& g = s.cfg.grid;
    Perturbation pe;
    pe.kind = Perturbation::Kind::bump;
    pe.band = 0;
    pe.u0 = 0.0;
    pe.u1 = 2.0;
    pe.target = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        pe.eps = eps;
        const CoercivityResult c = check_coercivity(s.state, perturbed_pair(s.state, g, s.cfg.model, pe), g,
                                                    s.cfg.model);
        CHECK(c.stable);
        CHECK(c.dirichlet_gap > 0.0);
        CHECK(c.dirichlet_gap < prev);
        prev = c.dirichlet_gap;
    }
}

TEST_CASE("mu bound and Schrodinger stability")
{
    const Solved& s = solved(0.0);
    const CheckResult c = check_mu_bound(s.state, s.cfg.M_target, s.cfg.model);
    CHECK(c.pass);
    CHECK(c.rhs == doctest::Approx(4.0 * s.state.energy.total_direct / s.cfg.M_target).epsilon(1e-15));

    const Grid& g = s.cfg.grid;
    const Field3D W1 = s.state.U + s.state.vext;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    Field3D W2 = W1;
    for (int l = 0; l < W2.cols(); ++l)
        for (int k = 0; k < W2.rows(); ++k)
            W2(k, l) += 0.05 * nd(rng);
    CHECK(check_schrodinger_stability(W1, W2, 4, g).pass);
    CHECK(check_schrodinger_stability(W1, W1, 4, g).pass);
}

TEST_CASE("uniqueness checks")
{
    const Solved& s = solved(0.0);
    InitialPotential a, b;
    b.kind = InitialPotential::Kind::random_smooth;
    b.seed = 2;
    const auto u = check_uniqueness(s.cfg, {a, b});
    REQUIRE(u.size() == 1);
    CHECK(u[0].pass);

    EquilibriumState shifted = s.state;
    shifted.U = shifted.U * 1.01;
    const auto v = check_uniqueness(std::vector<EquilibriumState>{s.state, shifted}, s.cfg.grid);
    CHECK_FALSE(v[0].pass);
}

TEST_CASE("small verification run passes and is deterministic")
{
    const Solved& s = solved(0.2);
    VerifyOptions o;
    o.n_pairs = 4;
    o.n_perturbations = 6;
    const VerifyReport r1 = run_verification(s.cfg, o);
    CHECK(r1.all_pass());
    for (const auto& c : r1.checks)
        if (!c.pass)
            MESSAGE("failed check " << c.name << " lhs=" << c.lhs << " rhs=" << c.rhs);
    const VerifyReport r2 = run_verification(s.cfg, o);
    REQUIRE(r1.checks.size() == r2.checks.size());
    for (std::size_t i = 0; i < r1.checks.size(); ++i) {
        CHECK(r1.checks[i].name == r2.checks[i].name);
        CHECK(r1.checks[i].lhs == r2.checks[i].lhs);
    }
    o.unsorted_weighted_l1_pair = true;
    CHECK_THROWS_AS(run_verification(s.cfg, o), PreconditionViolation);
}
