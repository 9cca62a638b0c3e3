#ifndef SUBBAND_SCHRODINGER1D_HPP
#define SUBBAND_SCHRODINGER1D_HPP

#include <vector>

#include "subband/grid.hpp"

namespace subband {

/// Eigenpairs of -1/2 d^2/dz^2 + W on one lateral slice.
///
/// `chi` has nz+1 rows (closed z nodes, zero at both ends) and one column per
/// band.  Each column is L2(0,1)-normalized under the trapezoid rule and
/// positive at the first interior node.
struct SliceEigenpairs {
    Eigen::ArrayXd lambda;
    Eigen::MatrixXd chi;
};

/// Per-slice spectra over the whole lateral grid.
struct SubbandSpectrum {
    int J = 0;
    Eigen::ArrayXXd lambda;   // lateral_size x J
    std::vector<Field3D> chi; // J fields, (nz+1) x lateral_size

    Field2D band_energy(int j) const { return lambda.col(j); }
    void require(const Grid& g, const char* what) const;
};

/// Solves one slice.  `W_interior` is the potential on the nz-1 interior z nodes.
SliceEigenpairs solve_slice(const Eigen::ArrayXd& W_interior, int J, const Grid& g);

/// Solves every lateral slice of the total potential W (sampled on closed z nodes).
SubbandSpectrum compute_spectrum(const Field3D& W, int J, const Grid& g);

/// |lambda_j[W1] - lambda_j[W2]| for j = 1..J on one slice (interior samples).
Eigen::ArrayXd eigenvalue_stability_gap(const Eigen::ArrayXd& W1, const Eigen::ArrayXd& W2, int J,
                                        const Grid& g);

/// Exact eigenvalues (1 - cos(pi j hz)) / hz^2 of the discrete operator with W = 0.
double free_eigenvalue(int j, const Grid& g);

/// Discrete ||d_z chi||^2 from forward differences over the nz cells.
double z_kinetic_energy(const Eigen::Ref<const Eigen::ArrayXd>& chi, const Grid& g);

/// Rayleigh energy 1/2 ||d_z chi||^2 + int W chi^2 with W on closed z nodes.
double rayleigh_energy(const Eigen::Ref<const Eigen::ArrayXd>& chi,
                       const Eigen::Ref<const Eigen::ArrayXd>& W, const Grid& g);

/// Trapezoid L2(0,1) inner product of two z-profiles.
double z_inner(const Eigen::Ref<const Eigen::ArrayXd>& a, const Eigen::Ref<const Eigen::ArrayXd>& b,
               const Grid& g);

} // namespace subband

#endif
