#include <doctest.h>

#include <cmath>
#include <random>

#include "subband/schrodinger1d.hpp"

using namespace subband;

namespace {
const double pi = 3.14159265358979323846;

// (1 - cos(pi j h)) / h^2, evaluated without cancellation.
double fd_eigenvalue(int j, double h)
{
    const double s = std::sin(0.5 * pi * j * h);
    return 2.0 * s * s / (h * h);
}

Eigen::ArrayXd random_profile(std::mt19937_64& rng, int n, double scale)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::ArrayXd w(n);
    for (int k = 0; k < n; ++k)
        w(k) = scale * u(rng);
    return w;
}

// Residual ||T chi - lambda chi||_2 with T built here from its definition.
double residual(const Eigen::ArrayXd& W, const Eigen::VectorXd& chi_full, double lam, double h)
{
    const int n = static_cast<int>(W.size());
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double c = chi_full(k + 1);
        const double tc = (1.0 / (h * h) + W(k)) * c - 0.5 / (h * h) * (chi_full(k) + chi_full(k + 2));
        r2 += (tc - lam * c) * (tc - lam * c);
    }
    return std::sqrt(r2);
}
} // namespace

TEST_CASE("free slice reproduces discrete eigenvalues")
{
    Grid g(2, 2, 200);
    const auto s = solve_slice(Eigen::ArrayXd::Zero(199), 10, g);
    for (int j = 1; j <= 10; ++j)
        CHECK(std::abs(s.lambda(j - 1) - fd_eigenvalue(j, g.hz())) <= 1e-12 * fd_eigenvalue(j, g.hz()));
    CHECK(std::abs(s.lambda(0) - 0.5 * pi * pi) <= 5e-4);
    CHECK(free_eigenvalue(3, g) == doctest::Approx(fd_eigenvalue(3, g.hz())).epsilon(1e-15));
}

TEST_CASE("continuum ground state converges at second order")
{
    double prev = 0.0;
    for (int nz : {16, 32, 64, 128}) {
        Grid g(2, 2, nz);
        const double err = std::abs(solve_slice(Eigen::ArrayXd::Zero(nz - 1), 1, g).lambda(0) - 0.5 * pi * pi);
        if (prev > 0.0)
            CHECK(prev / err == doctest::Approx(4.0).epsilon(0.02));
        prev = err;
    }
}

TEST_CASE("constant shift moves eigenvalues and keeps modes")
{
    Grid g(2, 2, 48);
    std::mt19937_64 rng(3);
    const Eigen::ArrayXd W = random_profile(rng, 47, 20.0);
    const auto a = solve_slice(W, 6, g);
    const auto b = solve_slice(W + 2.5, 6, g);
    for (int j = 0; j < 6; ++j) {
        CHECK(b.lambda(j) - a.lambda(j) == doctest::Approx(2.5).epsilon(1e-11));
        CHECK((a.chi.col(j) - b.chi.col(j)).cwiseAbs().maxCoeff() < 1e-8);
    }
    const auto gaps = eigenvalue_stability_gap(W, W + 2.5, 6, g);
    CHECK((gaps - 2.5).abs().maxCoeff() < 1e-10);
    CHECK(eigenvalue_stability_gap(W, W, 6, g).maxCoeff() == 0.0);
}

TEST_CASE("eigenpair invariants on random potentials")
{
    Grid g(2, 2, 64);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::ArrayXd W = random_profile(rng, 63, 50.0);
        const int J = 8;
        const auto s = solve_slice(W, J, g);
        for (int j = 0; j < J; ++j) {
            if (j > 0)
                CHECK(s.lambda(j) > s.lambda(j - 1));
            // trapezoid normalization and orthogonality
            for (int k = 0; k <= j; ++k) {
                double ip = 0.0;
                for (int z = 0; z <= g.nz(); ++z)
                    ip += g.z_weights()(z) * s.chi(z, j) * s.chi(z, k);
                CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) <= 1e-10);
            }
            CHECK(s.chi(0, j) == 0.0);
            CHECK(s.chi(g.nz(), j) == 0.0);
            CHECK(s.chi(1, j) > 0.0);
            // residual relative to the Euclidean-normalized vector
            const Eigen::VectorXd v = s.chi.col(j) * std::sqrt(g.hz());
            CHECK(residual(W, v, s.lambda(j), g.hz()) <= 1e-8 * std::abs(s.lambda(j)));
            // min-max lower bound for W >= 0
            CHECK(s.lambda(j) >= fd_eigenvalue(j + 1, g.hz()) * (1.0 - 1e-14));
        }
        // monotone in the potential, and Lipschitz in sup norm
        const Eigen::ArrayXd d = random_profile(rng, 63, 3.0);
        const auto t = solve_slice(W + d, J, g);
        const auto gaps = eigenvalue_stability_gap(W, W + d, J, g);
        for (int j = 0; j < J; ++j) {
            CHECK(t.lambda(j) >= s.lambda(j));
            CHECK(gaps(j) <= d.abs().maxCoeff() + 1e-10);
        }
    }
}

TEST_CASE("spectrum assembly and errors")
{
    Grid g(3, 2, 20);
    Field3D W = g.zeros_3d();
    for (int l = 0; l < g.lateral_size(); ++l)
        W.col(l).setConstant(0.5 * l);
    const auto sp = compute_spectrum(W, 3, g);
    CHECK(sp.J == 3);
    CHECK(sp.chi.size() == 3);
    for (int l = 0; l < g.lateral_size(); ++l)
        CHECK(sp.lambda(l, 0) == doctest::Approx(fd_eigenvalue(1, g.hz()) + 0.5 * l).epsilon(1e-12));
    CHECK(rayleigh_energy(sp.chi[1].col(2), W.col(2), g) == doctest::Approx(sp.lambda(2, 1)).epsilon(1e-12));

    CHECK_THROWS_AS(solve_slice(Eigen::ArrayXd::Zero(19), 0, g), InvalidArgument);
    CHECK_THROWS_AS(solve_slice(Eigen::ArrayXd::Zero(19), 20, g), InvalidArgument);
    CHECK_THROWS_AS(solve_slice(Eigen::ArrayXd::Zero(18), 2, g), DimensionMismatch);
    Eigen::ArrayXd bad = Eigen::ArrayXd::Zero(19);
    bad(3) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solve_slice(bad, 2, g), InvalidArgument);
    CHECK_THROWS_AS(compute_spectrum(Field3D::Zero(5, 5), 2, g), DimensionMismatch);
}

TEST_CASE("full band count and determinism")
{
    Grid g(2, 2, 12);
    std::mt19937_64 rng(5);
    const Eigen::ArrayXd W = random_profile(rng, 11, 10.0);
    const auto a = solve_slice(W, 11, g);
    const auto b = solve_slice(W, 11, g);
    CHECK((a.lambda == b.lambda).all());
    CHECK((a.chi.array() == b.chi.array()).all());
    // trace of the matrix equals the eigenvalue sum
    const double trace = 11.0 / (g.hz() * g.hz()) + W.sum();
    CHECK(a.lambda.sum() == doctest::Approx(trace).epsilon(1e-12));
}
