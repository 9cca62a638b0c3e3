#ifndef SUBBAND_POISSON3D_HPP
#define SUBBAND_POISSON3D_HPP

#include <functional>

#include "subband/grid.hpp"

namespace subband {

enum class PoissonMethod { cg, spectral };

struct PoissonOptions {
    PoissonMethod method = PoissonMethod::cg;
    double rel_tol = 1e-10;
    int max_iter = 0; // 0 selects a size-dependent default
    /// Called after every solve with (rho, U); used by audits of the weak-form identity.
    std::function<void(const Field3D&, const Field3D&)> observer;
};

/// Solves -Laplace U = rho with U = 0 on the lateral boundary and dU/dz = 0
/// at z = 0, 1 (mirrored ghost nodes).
///
/// The discrete operator is W^{-1} G^T W_e G, with G the edge differences
/// and W, W_e the node and edge quadrature weights, so potential_pairing(U, rho)
/// equals dirichlet_energy(U) up to the solver residual.  `guess` optionally
/// warm-starts CG.
Field3D solve_poisson(const Field3D& rho, const Grid& g, const PoissonOptions& opt = {},
                      const Field3D* guess = nullptr);

/// Discrete -Laplace U (node form, BC-consistent).
Field3D apply_negative_laplacian(const Field3D& U, const Grid& g);

/// Discrete int |grad U|^2 over all edges, lateral boundary edges included.
double dirichlet_energy(const Field3D& U, const Grid& g);

/// Discrete int U rho.
double potential_pairing(const Field3D& U, const Field3D& rho, const Grid& g);

/// Iteration count of the default CG cap for a grid and tolerance.
int default_cg_iterations(const Grid& g, double rel_tol);

} // namespace subband

#endif
