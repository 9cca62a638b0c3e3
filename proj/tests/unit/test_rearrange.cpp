#include <doctest.h>

#include <cmath>
#include <random>

#include "subband/rearrange.hpp"
#include "subband/verify.hpp"

using namespace subband;

namespace {
const double pi = 3.14159265358979323846;

Field3D sine_mode(int j, const Grid& g)
{
    Field3D c = g.zeros_3d();
    for (int k = 0; k <= g.nz(); ++k)
        c.row(k).setConstant(std::sqrt(2.0) * std::sin(j * pi * g.z(k)));
    c.row(0).setZero();
    c.row(g.nz()).setZero();
    return c;
}

TestPair swapped_pair(const Grid& g)
{
    TestPair p;
    p.J = 2;
    p.vgrid = {VelocityGrid::composite({0.0, 1.0, 4.0}, 4)};
    p.chi = {sine_mode(2, g), sine_mode(1, g)};
    p.h = rayleigh_table(p.chi, g.zeros_3d(), g);
    const int nv = p.vgrid[0].size();
    for (int l = 0; l < g.lateral_size(); ++l) {
        Eigen::ArrayXXd f(nv, 2);
        for (int i = 0; i < nv; ++i) {
            f(i, 0) = 0.3 * std::exp(-p.vgrid[0].energy()(i));
            f(i, 1) = 0.7 / (1.0 + l + i);
        }
        p.f.push_back(f);
    }
    return p;
}

double max_abs(const Field3D& a) { return a.abs().maxCoeff(); }
} // namespace

TEST_CASE("energy rearrangement restores the natural order")
{
    Grid g(3, 2, 40);
    const TestPair p = swapped_pair(g);
    p.validate(g);
    CHECK_FALSE(is_energy_sorted(p, g));
    const TestPair s = rearrange_energy_increasing(p, g);
    CHECK(is_energy_sorted(s, g));
    for (int l = 0; l < g.lateral_size(); ++l) {
        CHECK(s.h(l, 0) < s.h(l, 1));
        CHECK((s.chi[0].col(l) - p.chi[1].col(l)).abs().maxCoeff() == 0.0);
        CHECK((s.f[l].col(0) - p.f[l].col(1)).abs().maxCoeff() == 0.0);
        CHECK((s.f[l].col(1) - p.f[l].col(0)).abs().maxCoeff() == 0.0);
    }
    const Field3D r0 = pair_density(p, g);
    const Field3D r1 = pair_density(s, g);
    CHECK(max_abs(r0 - r1) <= 1e-14 * max_abs(r0));
    // sorted input is left unchanged
    const TestPair s2 = rearrange_energy_increasing(s, g);
    for (int l = 0; l < g.lateral_size(); ++l)
        CHECK((s2.f[l] == s.f[l]).all());
    CHECK((s2.h == s.h).all());
}

TEST_CASE("occupation rearrangement sorts each velocity decreasingly")
{
    Grid g(2, 2, 16);
    TestPair p;
    p.J = 3;
    p.vgrid = {VelocityGrid::composite({0.0, 1.0}, 2)};
    p.chi = {sine_mode(1, g), sine_mode(2, g), sine_mode(3, g)};
    p.h = rayleigh_table(p.chi, g.zeros_3d(), g);
    for (int l = 0; l < g.lateral_size(); ++l) {
        Eigen::ArrayXXd f(2, 3);
        f << 0.2, 0.9, 0.5, 0.4, 0.4, 0.4;
        p.f.push_back(f);
    }
    const TestPair d = rearrange_occupation_decreasing(p);
    REQUIRE(d.has_labels());
    for (int l = 0; l < g.lateral_size(); ++l) {
        CHECK(d.f[l](0, 0) == 0.9);
        CHECK(d.f[l](0, 1) == 0.5);
        CHECK(d.f[l](0, 2) == 0.2);
        CHECK(d.label(l, 0, 0) == 1);
        CHECK(d.label(l, 0, 1) == 2);
        CHECK(d.label(l, 0, 2) == 0);
        // ties keep their order
        for (int j = 0; j < 3; ++j) {
            CHECK(d.f[l](1, j) == 0.4);
            CHECK(d.label(l, 1, j) == j);
        }
    }
    const Field3D r0 = pair_density(p, g);
    CHECK(max_abs(pair_density(d, g) - r0) <= 1e-15 * max_abs(r0) + 1e-300);
    // applying the labelled rearrangement twice composes correctly
    const TestPair dd = rearrange_occupation_decreasing(d);
    for (int l = 0; l < g.lateral_size(); ++l) {
        CHECK((dd.f[l] == d.f[l]).all());
        CHECK((dd.labels[l] == d.labels[l]).all());
    }
    CHECK_THROWS_AS(rearrange_energy_increasing(d, g), PreconditionViolation);
}

TEST_CASE("rearrangements preserve mass, density and energy on random pairs")
{
    Grid g(5, 4, 32);
    std::mt19937_64 rng(7);
    const Field3D W = ExternalPotential::z_well(8.0).sample(g);
    const OccupancyModel m = OccupancyModel::power(0.2, 2.0);
    for (int t = 0; t < 10; ++t) {
        const TestPair p = random_test_pair(g, W, 4, rng);
        const PairFunctionals a = pair_functionals(p, W, g, m);
        const TestPair up = rearrange_energy_increasing(p, g);
        const TestPair down = rearrange_occupation_decreasing(up);
        for (const TestPair* q : {&up, &down}) {
            const PairFunctionals b = pair_functionals(*q, W, g, m);
            CHECK(std::abs(b.mass - a.mass) <= 1e-12 * a.mass);
            CHECK(std::abs(b.free_energy - a.free_energy) <= 1e-12 * (1.0 + std::abs(a.free_energy)));
            CHECK(max_abs(b.rho - a.rho) <= 1e-12 * max_abs(a.rho));
        }
        // idempotence
        const TestPair up2 = rearrange_energy_increasing(up, g);
        const TestPair down2 = rearrange_occupation_decreasing(down);
        for (int l = 0; l < g.lateral_size(); ++l) {
            CHECK((up2.f[l] == up.f[l]).all());
            CHECK((down2.f[l] == down.f[l]).all());
        }
        // each velocity row of the decreasing pair is non-increasing in j
        for (int l = 0; l < g.lateral_size(); ++l)
            for (int i = 0; i < down.f[l].rows(); ++i)
                for (int j = 1; j < down.J; ++j)
                    CHECK(down.f[l](i, j) <= down.f[l](i, j - 1));
    }
}

TEST_CASE("constant occupations are unchanged")
{
    Grid g(2, 3, 16);
    TestPair p;
    p.J = 2;
    p.vgrid = {VelocityGrid::composite({0.0, 2.0}, 3)};
    p.chi = {sine_mode(1, g), sine_mode(2, g)};
    p.h = rayleigh_table(p.chi, g.zeros_3d(), g);
    for (int l = 0; l < g.lateral_size(); ++l)
        p.f.push_back(Eigen::ArrayXXd::Constant(3, 2, 0.25));
    const TestPair d = rearrange_occupation_decreasing(rearrange_energy_increasing(p, g));
    for (int l = 0; l < g.lateral_size(); ++l) {
        CHECK((d.f[l] == p.f[l]).all());
        for (int j = 0; j < 2; ++j)
            CHECK(d.label(l, 0, j) == j);
    }
}
