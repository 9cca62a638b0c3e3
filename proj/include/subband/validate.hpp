#ifndef SUBBAND_VALIDATE_HPP
#define SUBBAND_VALIDATE_HPP

#include <vector>

#include "subband/verify.hpp"

namespace subband {

/// Discretization studies against closed-form oracles.
struct ValidateReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

/// Free-particle slice at nz: discrete eigenvalues to 1e-12 relative for
/// j <= bands, and the continuum ground state within 5e-4.
std::vector<CheckResult> validate_eigensolver(int nz = 200, int bands = 10);

struct PoissonStudy {
    std::vector<int> n;
    std::vector<double> linf_error;
    std::vector<double> ratio; // error[k-1] / error[k]
    double max_weak_defect = 0.0;
    double cg_spectral_gap = 0.0; // max |U_cg - U_spectral| / max |U|
};

/// Manufactured solution sin(pi y1) sin(pi y2) cos(pi z) on grids with
/// spacing 1/n in every direction.
PoissonStudy poisson_convergence(const std::vector<int>& n = {16, 32, 64});
std::vector<CheckResult> validate_poisson(const PoissonStudy& s);

/// Closed-form profiles against adaptive quadrature on a in [-1, 10].
std::vector<CheckResult> validate_profiles();

ValidateReport run_validation();

} // namespace subband

#endif
