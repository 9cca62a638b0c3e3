#ifndef SUBBAND_OCCUPANCY_HPP
#define SUBBAND_OCCUPANCY_HPP

#include <functional>
#include <optional>

#include "subband/grid.hpp"
#include "subband/schrodinger1d.hpp"

namespace subband {

/// Convex Casimir density beta on [0,1] with beta(0) = 0.
///
/// The power family beta(s) = s^p / p (p > 1) has closed-form occupation
/// profiles; any other kind supplies the three callbacks and falls back to
/// adaptive quadrature.
struct CasimirFunction {
    std::function<double(double)> beta;
    std::function<double(double)> beta_prime;
    std::function<double(double)> beta_prime_inverse;
    std::optional<double> power_exponent;

    static CasimirFunction power_law(double p);
};

class OccupancyModel {
public:
    OccupancyModel();
    OccupancyModel(double temperature, CasimirFunction casimir);
    static OccupancyModel power(double temperature, double p);

    double temperature() const { return T_; }
    const CasimirFunction& casimir() const { return casimir_; }
    bool has_closed_form() const { return casimir_.power_exponent.has_value(); }

    double beta(double s) const { return casimir_.beta(s); }
    double beta_prime(double s) const { return casimir_.beta_prime(s); }
    /// Gap T*beta'(1) above which occupations saturate at 1.
    double saturation_gap() const { return T_ * casimir_.beta_prime(1.0); }

private:
    double T_;
    CasimirFunction casimir_;
};

/// Occupation law: indicator of s >= 0 at T = 0, otherwise min((beta')^{-1}(s/T), 1) on s >= 0.
double beta_tilde(double s, const OccupancyModel& m);

/// G(a) = int_0^{a+} beta_tilde(s) ds; 2*pi*G(mu - lambda) is a band's areal density.
double profile_G(double a, const OccupancyModel& m);
/// K(a) = int_0^{a+} (a - s) beta_tilde(s) ds; 2*pi*K is the in-plane kinetic energy density.
double profile_K(double a, const OccupancyModel& m);
/// B(a) = int_0^{a+} beta(beta_tilde(s)) ds; 2*pi*B is the Casimir density.
double profile_B(double a, const OccupancyModel& m);

/// Quadrature versions of the three profiles (always numeric, abs. tol. 1e-12).
double profile_G_quadrature(double a, const OccupancyModel& m);
double profile_K_quadrature(double a, const OccupancyModel& m);
double profile_B_quadrature(double a, const OccupancyModel& m);

/// Total mass 2*pi * sum_j int_omega G(mu - lambda_j(y)) dy.
/// `lambda` has one row per lateral node and one column per band.
double mass_of_mu(double mu, const Eigen::ArrayXXd& lambda, const Grid& g, const OccupancyModel& m);
double mass_of_mu(double mu, const SubbandSpectrum& spec, const Grid& g, const OccupancyModel& m);

/// Chemical potential with mass_of_mu(mu) = M, by doubling bracket and bisection.
double solve_mu(double M, const Eigen::ArrayXXd& lambda, const Grid& g, const OccupancyModel& m);
double solve_mu(double M, const SubbandSpectrum& spec, const Grid& g, const OccupancyModel& m);

} // namespace subband

#endif
