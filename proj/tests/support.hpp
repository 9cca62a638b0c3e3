#ifndef SUBBAND_TEST_SUPPORT_HPP
#define SUBBAND_TEST_SUPPORT_HPP

#include "subband/equilibrium.hpp"

namespace testing_support {

// A coarse but fully coupled problem that converges in well under a second.
inline subband::SolverConfig small_config(double T = 0.0)
{
    subband::SolverConfig c;
    c.grid = subband::Grid(8, 8, 32);
    c.vext = subband::ExternalPotential::z_well(8.0);
    c.model = subband::OccupancyModel::power(T, 2.0);
    return c;
}

inline double discrete_eigenvalue(int j, double h)
{
    const double pi = 3.14159265358979323846;
    const double s = std::sin(0.5 * pi * j * h);
    return 2.0 * s * s / (h * h);
}

} // namespace testing_support

#endif
