#include "subband/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subband/quadrature.hpp"

namespace subband {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kProfileTol = 1e-12;

double positive_part(double a) { return a > 0.0 ? a : 0.0; }

// Integrates phi(s) over [0, a] with a breakpoint at the saturation gap.
template <typename F>
double integrate_gap(F phi, double a, const OccupancyModel& m)
{
    if (!(a > 0.0))
        return 0.0;
    const double sc = m.saturation_gap();
    if (sc > 0.0 && sc < a)
        return integrate_adaptive(phi, 0.0, sc, 0.5 * kProfileTol)
               + integrate_adaptive(phi, sc, a, 0.5 * kProfileTol);
    return integrate_adaptive(phi, 0.0, a, kProfileTol);
}

} // namespace

CasimirFunction CasimirFunction::power_law(double p)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw InvalidArgument("power Casimir needs a finite exponent p > 1");
    CasimirFunction c;
    c.beta = [p](double s) { return std::pow(s, p) / p; };
    c.beta_prime = [p](double s) { return std::pow(s, p - 1.0); };
    c.beta_prime_inverse = [p](double t) { return std::pow(t, 1.0 / (p - 1.0)); };
    c.power_exponent = p;
    return c;
}

OccupancyModel::OccupancyModel() : OccupancyModel(0.0, CasimirFunction::power_law(2.0)) {}

OccupancyModel::OccupancyModel(double temperature, CasimirFunction casimir)
    : T_(temperature), casimir_(std::move(casimir))
{
    if (!(T_ >= 0.0) || !std::isfinite(T_))
        throw InvalidArgument("temperature must be finite and non-negative");
    if (!casimir_.beta || !casimir_.beta_prime || !casimir_.beta_prime_inverse)
        throw InvalidArgument("Casimir function needs beta, beta' and (beta')^{-1}");
}

OccupancyModel OccupancyModel::power(double temperature, double p)
{
    return OccupancyModel(temperature, CasimirFunction::power_law(p));
}

double beta_tilde(double s, const OccupancyModel& m)
{
    const double T = m.temperature();
    if (T == 0.0)
        return s >= 0.0 ? 1.0 : 0.0;
    if (s < 0.0)
        return 0.0;
    if (s >= m.saturation_gap())
        return 1.0;
    return std::min(m.casimir().beta_prime_inverse(s / T), 1.0);
}

double profile_G_quadrature(double a, const OccupancyModel& m)
{
    if (m.temperature() == 0.0)
        return positive_part(a);
    return integrate_gap([&](double s) { return beta_tilde(s, m); }, a, m);
}

double profile_K_quadrature(double a, const OccupancyModel& m)
{
    if (m.temperature() == 0.0)
        return 0.5 * positive_part(a) * positive_part(a);
    return integrate_gap([&](double s) { return (a - s) * beta_tilde(s, m); }, a, m);
}

double profile_B_quadrature(double a, const OccupancyModel& m)
{
    if (m.temperature() == 0.0)
        return m.beta(1.0) * positive_part(a);
    return integrate_gap([&](double s) { return m.beta(beta_tilde(s, m)); }, a, m);
}

// Closed forms for beta(s) = s^p/p, q = 1/(p-1); the saturation gap equals T.
double profile_G(double a, const OccupancyModel& m)
{
    const double T = m.temperature();
    if (!(a > 0.0))
        return 0.0;
    if (T == 0.0)
        return a;
    if (!m.has_closed_form())
        return profile_G_quadrature(a, m);
    const double q = 1.0 / (*m.casimir().power_exponent - 1.0);
    if (a <= T)
        return std::pow(a, q + 1.0) / ((q + 1.0) * std::pow(T, q));
    return T / (q + 1.0) + (a - T);
}

double profile_K(double a, const OccupancyModel& m)
{
    const double T = m.temperature();
    if (!(a > 0.0))
        return 0.0;
    if (T == 0.0)
        return 0.5 * a * a;
    if (!m.has_closed_form())
        return profile_K_quadrature(a, m);
    const double q = 1.0 / (*m.casimir().power_exponent - 1.0);
    if (a <= T)
        return std::pow(a, q + 2.0) / ((q + 1.0) * (q + 2.0) * std::pow(T, q));
    const double d = a - T;
    return a * T / (q + 1.0) - T * T / (q + 2.0) + 0.5 * d * d;
}

double profile_B(double a, const OccupancyModel& m)
{
    const double T = m.temperature();
    if (!(a > 0.0))
        return 0.0;
    if (T == 0.0)
        return m.beta(1.0) * a;
    if (!m.has_closed_form())
        return profile_B_quadrature(a, m);
    const double p = *m.casimir().power_exponent;
    const double q = 1.0 / (p - 1.0);
    if (a <= T)
        return std::pow(a, q + 2.0) / (p * (q + 2.0) * std::pow(T, q + 1.0));
    return T / (p * (q + 2.0)) + (a - T) / p;
}

double mass_of_mu(double mu, const Eigen::ArrayXXd& lambda, const Grid& g, const OccupancyModel& m)
{
    if (lambda.rows() != g.lateral_size())
        throw DimensionMismatch("mass_of_mu: spectrum does not match grid");
    double total = 0.0;
    for (Eigen::Index j = 0; j < lambda.cols(); ++j) {
        double band = 0.0;
        for (Eigen::Index l = 0; l < lambda.rows(); ++l)
            band += profile_G(mu - lambda(l, j), m);
        total += band * g.lateral_weight();
    }
    return kTwoPi * total;
}

double mass_of_mu(double mu, const SubbandSpectrum& spec, const Grid& g, const OccupancyModel& m)
{
    spec.require(g, "mass_of_mu");
    return mass_of_mu(mu, spec.lambda, g, m);
}

double solve_mu(double M, const Eigen::ArrayXXd& lambda, const Grid& g, const OccupancyModel& m)
{
    if (!(M > 0.0) || !std::isfinite(M))
        throw InvalidArgument("solve_mu: target mass must be positive and finite");
    if (lambda.rows() != g.lateral_size() || lambda.cols() < 1)
        throw DimensionMismatch("solve_mu: spectrum does not match grid");
    if (!lambda.allFinite())
        throw InvalidArgument("solve_mu: spectrum is not finite");

    const double lo0 = lambda.col(0).minCoeff();
    double lo = lo0;
    double step = std::max(1.0, std::abs(lo0)) * 1e-3;
    double hi = lo + step;
    int doublings = 0;
    while (mass_of_mu(hi, lambda, g, m) < M) {
        lo = hi;
        step *= 2.0;
        hi = lo0 + step;
        if (++doublings > 200)
            throw NonConvergence("solve_mu: failed to bracket the target mass");
    }
    // Bisect to the resolution of doubles; mass is nondecreasing in mu.
    for (int it = 0; it < 400; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi)
            break;
        if (mass_of_mu(mid, lambda, g, m) < M)
            lo = mid;
        else
            hi = mid;
    }
    const double m_lo = mass_of_mu(lo, lambda, g, m);
    const double m_hi = mass_of_mu(hi, lambda, g, m);
    return (std::abs(m_lo - M) < std::abs(m_hi - M)) ? lo : hi;
}

double solve_mu(double M, const SubbandSpectrum& spec, const Grid& g, const OccupancyModel& m)
{
    spec.require(g, "solve_mu");
    return solve_mu(M, spec.lambda, g, m);
}

} // namespace subband
