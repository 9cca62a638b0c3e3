#ifndef SUBBAND_EQUILIBRIUM_HPP
#define SUBBAND_EQUILIBRIUM_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "subband/grid.hpp"
#include "subband/occupancy.hpp"
#include "subband/poisson3d.hpp"
#include "subband/schrodinger1d.hpp"

namespace subband {

struct ExternalPotential {
    enum class Kind { zero, z_well, lateral_bump };
    Kind kind = Kind::zero;
    double strength = 8.0;
    // lateral_bump: strength * exp(-|y - center|^2 / width^2), constant in z
    double center1 = 0.5, center2 = 0.5, width = 0.25;

    static ExternalPotential zero() { return {}; }
    static ExternalPotential z_well(double c);
    Field3D sample(const Grid& g) const;
};

struct InitialPotential {
    enum class Kind { zero, random_smooth, supplied };
    Kind kind = Kind::zero;
    std::uint64_t seed = 42;
    double amplitude = 1.0;
    Field3D values; // used by Kind::supplied

    /// random_smooth: low lateral sine modes times z cosine modes with seeded
    /// coefficients in [-amplitude, amplitude], damped by mode index.
    Field3D sample(const Grid& g) const;
};

struct SolverConfig {
    double M_target = 1.0;
    OccupancyModel model;
    ExternalPotential vext;
    double theta = 0.5;
    double fp_tol = 1e-8;
    int max_outer = 300;
    int J_margin = 2;
    Grid grid{24, 24, 64};
    InitialPotential init;
    PoissonOptions poisson;
    bool self_consistent = true; // false freezes U = 0 (uncoupled problem)

    void validate() const;
};

struct FreeEnergyBreakdown {
    double kinetic_v = 0.0;
    double band_energy = 0.0;
    double field_energy = 0.0;
    double casimir = 0.0;
    double quantum_kinetic = 0.0;
    double vext_pairing = 0.0;
    double total_primal = 0.0;
    double total_direct = 0.0;
};

struct DensityAssembly {
    std::vector<Field2D> rho_j;
    Field3D rho;
};

struct EquilibriumState {
    double mu = 0.0;
    SubbandSpectrum spec;
    Field3D U;
    Field3D vext;
    Field3D rho;
    std::vector<Field2D> rho_j;
    FreeEnergyBreakdown energy;
    double residual = 0.0;
    int iterations = 0;
};

struct TraceRow {
    int iter = 0;
    double residual = 0.0;
    double mu = 0.0;
    int J_active = 0;
    double F = 0.0;
    double theta = 0.0;
};
using IterationTrace = std::vector<TraceRow>;

struct EquilibriumResult {
    EquilibriumState state;
    IterationTrace trace;
};

/// Thrown when the outer iteration stalls; carries the trace for diagnosis.
class EquilibriumNonConvergence : public NonConvergence {
public:
    EquilibriumNonConvergence(const std::string& what, IterationTrace trace)
        : NonConvergence(what), trace_(std::move(trace))
    {
    }
    const IterationTrace& trace() const { return trace_; }

private:
    IterationTrace trace_;
};

DensityAssembly assemble_density(const SubbandSpectrum& spec, double mu, const OccupancyModel& m,
                                 const Grid& g);

/// Both evaluation routes of the free energy.  `U` is the potential of `rho`.
FreeEnergyBreakdown free_energy(const SubbandSpectrum& spec, double mu,
                                const std::vector<Field2D>& rho_j, const Field3D& rho,
                                const Field3D& U, const Field3D& vext, const Grid& g,
                                const OccupancyModel& m);
FreeEnergyBreakdown free_energy(const EquilibriumState& s, const Grid& g, const OccupancyModel& m);

EquilibriumResult solve_equilibrium(const SolverConfig& cfg);

struct SubbandCount {
    int J_active = 0;
    double bound = 0.0; // sqrt(3 mu)/pi + 1
    bool pass = true;
};

int active_subband_count(const SubbandSpectrum& spec, double mu);
SubbandCount check_active_subbands(const EquilibriumState& s);

int choose_J_max(double mu_estimate, int margin);

/// Minimum over slices of lambda_{j+1} - lambda_j.
double min_spectral_gap(const SubbandSpectrum& spec);

} // namespace subband

#endif
