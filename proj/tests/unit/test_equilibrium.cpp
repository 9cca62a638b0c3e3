#include <doctest.h>

#include <cmath>

#include "subband/equilibrium.hpp"
#include "support.hpp"

using namespace subband;
using testing_support::discrete_eigenvalue;
using testing_support::small_config;

namespace {
const double pi = 3.14159265358979323846;

double total_mass(const EquilibriumState& s, const Grid& g)
{
    double m = 0.0;
    for (const auto& r : s.rho_j)
        m += integrate_omega(r, g);
    return m;
}
} // namespace

TEST_CASE("choose_J_max")
{
    CHECK(choose_J_max(0.0, 2) == 4);
    CHECK(choose_J_max(0.0, 4) == 4);
    CHECK(choose_J_max(-3.0, 2) == 4);
    CHECK(choose_J_max(5.0, 2) == 4);
    CHECK(choose_J_max(100.0, 2) == 8);
    CHECK_THROWS_AS(choose_J_max(std::nan(""), 2), InvalidArgument);
}

TEST_CASE("active subband count and its bound")
{
    EquilibriumState s;
    s.spec.J = 3;
    s.spec.lambda.resize(4, 3);
    s.spec.lambda << 4.9, 19.7, 44.4, 4.95, 19.8, 44.5, 5.1, 20.0, 45.0, 5.2, 20.1, 45.1;
    s.mu = 5.0;
    SubbandCount c = check_active_subbands(s);
    CHECK(c.J_active == 1);
    CHECK(c.bound == doctest::Approx(std::sqrt(15.0) / pi + 1.0).epsilon(1e-15));
    CHECK(c.pass);
    s.mu = 4.0;
    CHECK(active_subband_count(s.spec, s.mu) == 0);
    CHECK(min_spectral_gap(s.spec) == doctest::Approx(14.8).epsilon(1e-12));
}

TEST_CASE("assemble_density")
{
    Grid g(4, 3, 16);
    const SubbandSpectrum sp = compute_spectrum(g.zeros_3d(), 3, g);
    const OccupancyModel cold;

    const DensityAssembly empty = assemble_density(sp, sp.lambda.minCoeff() - 1.0, cold, g);
    CHECK(empty.rho.abs().maxCoeff() == 0.0);

    const double lam1 = discrete_eigenvalue(1, g.hz());
    const double mu = lam1 + 0.4;
    const DensityAssembly d = assemble_density(sp, mu, cold, g);
    CHECK(d.rho_j.size() == 3);
    for (int l = 0; l < g.lateral_size(); ++l) {
        CHECK(d.rho_j[0](l) == doctest::Approx(2.0 * pi * 0.4).epsilon(1e-10));
        CHECK(d.rho_j[1](l) == 0.0);
    }
    // the z-integral of rho recovers the band densities
    const Field2D cols = integrate_columns_z(d.rho, g);
    for (int l = 0; l < g.lateral_size(); ++l)
        CHECK(cols(l) == doctest::Approx(d.rho_j[0](l)).epsilon(1e-10));
    CHECK(d.rho.minCoeff() >= 0.0);
}

TEST_CASE("uncoupled flat problem has a closed-form free energy")
{
    SolverConfig c;
    c.grid = Grid(6, 6, 64);
    c.self_consistent = false;
    c.M_target = 0.8;
    const EquilibriumResult r = solve_equilibrium(c);
    const Grid& g = c.grid;
    const double lam = discrete_eigenvalue(1, g.hz());
    const double a = c.M_target / (2.0 * pi * g.area());
    CHECK(r.state.mu == doctest::Approx(lam + a).epsilon(1e-10));
    // F = int 2 pi K(mu - lambda) + lambda M with K(a) = a^2 / 2
    const double F = 2.0 * pi * g.area() * 0.5 * a * a + lam * c.M_target;
    CHECK(r.state.energy.total_direct == doctest::Approx(F).epsilon(1e-10));
    CHECK(r.state.energy.total_primal == doctest::Approx(F).epsilon(1e-10));
    CHECK(std::abs(lam - 0.5 * pi * pi) < 1e-3);
    CHECK(r.state.energy.field_energy == 0.0);
    CHECK(r.trace.size() == 1);
}

TEST_CASE("empty state has zero free energy")
{
    Grid g(4, 4, 16);
    const SubbandSpectrum sp = compute_spectrum(g.zeros_3d(), 2, g);
    const double mu = sp.lambda.minCoeff() - 0.5;
    const DensityAssembly d = assemble_density(sp, mu, OccupancyModel::power(0.3, 2.0), g);
    const FreeEnergyBreakdown e
        = free_energy(sp, mu, d.rho_j, d.rho, g.zeros_3d(), g.zeros_3d(), g, OccupancyModel::power(0.3, 2.0));
    CHECK(e.total_direct == 0.0);
    CHECK(e.total_primal == 0.0);
    CHECK(e.casimir == 0.0);
}

TEST_CASE("near-linear regime matches the free spectrum")
{
    SolverConfig c;
    c.grid = Grid(6, 6, 32);
    c.M_target = 1e-6;
    const EquilibriumResult r = solve_equilibrium(c);
    const Grid& g = c.grid;
    for (int j = 0; j < r.state.spec.J; ++j)
        CHECK(std::abs(r.state.spec.lambda.col(j).maxCoeff() - discrete_eigenvalue(j + 1, g.hz())) <= 1e-4);
    // to first order the coupling shifts mu by the lateral mean of <chi_1, U chi_1>
    const double mu_free = discrete_eigenvalue(1, g.hz()) + c.M_target / (2.0 * pi * g.area());
    double shift = 0.0;
    for (int l = 0; l < g.lateral_size(); ++l) {
        const Eigen::ArrayXd chi = r.state.spec.chi[0].col(l);
        const Eigen::ArrayXd Uc = r.state.U.col(l);
        shift += z_inner(chi, (Uc * chi).eval(), g);
    }
    shift /= g.lateral_size();
    CHECK(shift > 0.0);
    CHECK(r.state.mu - mu_free == doctest::Approx(shift).epsilon(1e-4));
}

TEST_CASE("coupled solve satisfies the state invariants")
{
    for (double T : {0.0, 0.2}) {
        const SolverConfig c = small_config(T);
        const EquilibriumResult r = solve_equilibrium(c);
        const EquilibriumState& s = r.state;
        const Grid& g = c.grid;
        CHECK(s.residual <= c.fp_tol);
        CHECK(r.trace.back().residual <= c.fp_tol);
        CHECK(r.trace.size() == static_cast<std::size_t>(s.iterations));
        CHECK(std::abs(total_mass(s, g) - c.M_target) <= 1e-8 * c.M_target);

        Field3D rebuilt = g.zeros_3d();
        for (int j = 0; j < s.spec.J; ++j)
            for (int l = 0; l < g.lateral_size(); ++l)
                rebuilt.col(l) += s.rho_j[j](l) * s.spec.chi[j].col(l).square();
        CHECK((rebuilt - s.rho).abs().maxCoeff() <= 1e-12 * std::max(1.0, s.rho.abs().maxCoeff()));

        const auto& e = s.energy;
        CHECK(std::abs(e.total_primal - e.total_direct) <= 1e-6 * (1.0 + std::abs(e.total_direct)));
        CHECK(check_active_subbands(s).pass);
        CHECK(min_spectral_gap(s.spec) > 1e-10);
        CHECK(s.mu <= 4.0 / c.M_target * (e.total_direct + T * c.M_target));
        // the reported breakdown equals a fresh evaluation on the stored state
        const FreeEnergyBreakdown again = free_energy(s, g, c.model);
        CHECK(again.total_direct == doctest::Approx(e.total_direct).epsilon(1e-13));

        for (std::size_t k = 1; k < r.trace.size(); ++k)
            CHECK(r.trace[k].F <= r.trace[k - 1].F + 1e-12 * (1.0 + std::abs(r.trace[k - 1].F)));
        // potential of the assembled density, to solver accuracy
        const Field3D U = solve_poisson(s.rho, g);
        CHECK((U - s.U).abs().maxCoeff() <= 1e-8 * s.U.abs().maxCoeff());
    }
}

TEST_CASE("potential is independent of the initialization")
{
    SolverConfig c = small_config(0.2);
    const EquilibriumState a = solve_equilibrium(c).state;
    c.init.kind = InitialPotential::Kind::random_smooth;
    c.init.seed = 1;
    const EquilibriumState b = solve_equilibrium(c).state;
    const double d = std::sqrt(dirichlet_energy((a.U - b.U).eval(), c.grid));
    CHECK(d <= 1e-6 * (1.0 + std::sqrt(dirichlet_energy(a.U, c.grid))));
    // identical seeds are bitwise identical
    const EquilibriumState b2 = solve_equilibrium(c).state;
    CHECK((b.U == b2.U).all());
    CHECK(b.mu == b2.mu);
}

TEST_CASE("non-convergence carries the trace")
{
    SolverConfig c = small_config();
    c.max_outer = 1;
    try {
        solve_equilibrium(c);
        FAIL("expected non-convergence");
    } catch (const EquilibriumNonConvergence& e) {
        CHECK(e.trace().size() == 1);
        CHECK(e.trace()[0].iter == 1);
    }
}

TEST_CASE("config validation and external potentials")
{
    SolverConfig c = small_config();
    c.theta = 1.5;
    CHECK_THROWS_AS(solve_equilibrium(c), InvalidArgument);
    c = small_config();
    c.M_target = -1.0;
    CHECK_THROWS_AS(solve_equilibrium(c), InvalidArgument);

    Grid g(5, 5, 8);
    const Field3D w = ExternalPotential::z_well(8.0).sample(g);
    CHECK(w(4, 0) == doctest::Approx(8.0 * 0.5 * 0.5));
    CHECK(w(0, 3) == 0.0);
    ExternalPotential b;
    b.kind = ExternalPotential::Kind::lateral_bump;
    b.strength = 2.0;
    const Field3D bv = b.sample(g);
    CHECK(bv.minCoeff() >= 0.0);
    CHECK(bv(0, g.lateral_index(2, 2)) == doctest::Approx(2.0));

    InitialPotential ip;
    ip.kind = InitialPotential::Kind::supplied;
    ip.values = Field3D::Zero(2, 2);
    CHECK_THROWS_AS(ip.sample(g), DimensionMismatch);
    ip.kind = InitialPotential::Kind::random_smooth;
    ip.seed = 9;
    CHECK((ip.sample(g) == ip.sample(g)).all());
    CHECK(ip.sample(g).abs().maxCoeff() > 0.0);
}
