#ifndef SUBBAND_VERIFY_HPP
#define SUBBAND_VERIFY_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "subband/equilibrium.hpp"
#include "subband/test_pair.hpp"

namespace subband {

struct CheckResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0; // lhs / rhs, 0 when rhs == 0
    bool pass = false;
};

/// Implicit-constant inequalities: only the spread of the ratio is judged.
struct MonitorResult {
    std::string name;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int count = 0;
    bool pass = false; // all ratios finite and max/min < 1e3
};

struct VerifyReport {
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    std::vector<MonitorResult> monitors;
    bool all_pass() const;
};

double safe_ratio(double lhs, double rhs);

// ---- test pair construction ---------------------------------------------

/// Random admissible pair: J orthonormal z-modes per slice mixed from the
/// lowest sine modes, occupations c * exp(-u / tau) on a shared radial grid.
/// Rayleigh energies are taken for the potential W.
TestPair random_test_pair(const Grid& g, const Field3D& W, int J, std::mt19937_64& rng);

/// The equilibrium as a pair on per-node radial grids whose breakpoints
/// resolve every kink of the occupation profile, plus `extra_breaks`.
TestPair equilibrium_pair(const EquilibriumState& s, const Grid& g, const OccupancyModel& m,
                          const std::vector<double>& extra_breaks = {});

struct Perturbation {
    enum class Kind { bump, mass_preserving_bump, rotation };
    Kind kind = Kind::bump;
    double eps = 0.0;
    // lateral window (center, half-width) for the smooth cutoff A(y)
    double c1 = 0.5, c2 = 0.5, r1 = 0.3, r2 = 0.3;
    // bump: f -> f + eps A(y) b(u) (target - f) on band `band`, b supported on [u0, u1]
    int band = 0;
    double u0 = 0.0, u1 = 1.0, target = 1.0;
    // second (compensating) bump of the mass-preserving kind
    int band2 = 0;
    double v0 = 0.0, v1 = 1.0, target2 = 0.0;
    // rotation of (chi_band, chi_band+1) by angle eps * A(y)
};

TestPair perturbed_pair(const EquilibriumState& s, const Grid& g, const OccupancyModel& m,
                        const Perturbation& p);

/// Seeded family: bumps, mass-preserving bumps and two-band rotations with
/// eps cycling through `eps_levels` (rotation angles are capped at 0.2).
std::vector<Perturbation> perturbation_family(const EquilibriumState& s, const Grid& g,
                                              std::uint64_t seed, int count,
                                              const std::vector<double>& eps_levels);

// ---- checks ---------------------------------------------------------------

struct WeightedL1Result {
    double weighted_mass = 0.0;  // sum j^2 ||f_j||_1
    double kinetic_bound = 0.0;  // (3/pi^2) sum int ||d_z chi_j||^2 rho_j
    double energy_bound = 0.0;   // (6/pi^2) F
    bool pass_lower = false;
    bool pass_upper = false;
};
WeightedL1Result check_weighted_l1(const TestPair& p, const Field3D& vext, const Grid& g,
                                   const OccupancyModel& m, const PoissonOptions& popt = {});

struct InterpolationResult {
    double s = 0.0;
    double density_norm = 0.0;   // ||rho||_{L^{(5s-3)/(3s-1)}}
    double rhs_kinetic = 0.0;    // product of the kinetic interpolation inequality
    double rhs_upgraded = 0.0;   // (sum j^2 ||f_j||_1)^{2/(5s-3)} F^{3(s-1)/(5s-3)}
    double ratio_kinetic = 0.0;
    double ratio_upgraded = 0.0;
    double holder_lhs = 0.0;     // sum_j ||f_j||_{L^s}
    double holder_rhs = 0.0;
    bool holder_pass = false;
    double mass = 0.0;
};
InterpolationResult check_kinetic_interpolation(const TestPair& p, double s, const Field3D& vext,
                                                const Grid& g, const OccupancyModel& m,
                                                const PoissonOptions& popt = {});

struct CoercivityResult {
    double lhs = 0.0; // F(pert) - F(base)
    double rhs = 0.0;
    double dirichlet_gap = 0.0; // 1/2 ||grad(U_pert - U_base)||^2
    double delta = 0.0;         // |F(pert) - F*| + mu |M(pert) - M|
    double stability_bound = 0.0; // (1 + mu) delta
    double mass_change = 0.0;
    bool coercive = false;
    bool stable = false;
    Field3D U_pert;
};
/// Coercivity and the static stability estimate for one perturbation.
CoercivityResult check_coercivity(const EquilibriumState& base, const TestPair& pert, const Grid& g,
                                  const OccupancyModel& m, const PoissonOptions& popt = {});

CheckResult check_mu_bound(const EquilibriumState& s, double M, const OccupancyModel& m);

/// Pairwise gradient agreement of the potentials in `states`.
std::vector<CheckResult> check_uniqueness(const std::vector<EquilibriumState>& states, const Grid& g);

/// Runs one solve per initialization and compares the potentials.
std::vector<CheckResult> check_uniqueness(const SolverConfig& cfg,
                                          const std::vector<InitialPotential>& inits);

/// Eigenvalue shift against the sup-norm of the potential change, all slices.
CheckResult check_schrodinger_stability(const Field3D& W1, const Field3D& W2, int J, const Grid& g);

struct VerifyOptions {
    std::uint64_t seed = 42;
    int n_pairs = 50;
    int n_perturbations = 100;
    int pair_bands = 4;
    double interpolation_s = 2.0;
    std::vector<double> eps_levels{1e-1, 1e-2};
    std::vector<double> stability_levels{1e-1, 1e-2, 1e-3};
    bool unsorted_weighted_l1_pair = false; // deliberately feed an unsorted pair
};

/// Solves cfg, then runs the full battery.  Precondition violations propagate.
VerifyReport run_verification(const SolverConfig& cfg, const VerifyOptions& opt);

} // namespace subband

#endif
