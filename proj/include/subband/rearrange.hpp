#ifndef SUBBAND_REARRANGE_HPP
#define SUBBAND_REARRANGE_HPP

#include "subband/test_pair.hpp"

namespace subband {

/// Per slice, permutes bands so ||d_z chi_j||^2 is nondecreasing in j, moving
/// f and h along (stable sort; ties keep index order).  Requires a pair without
/// (y, v)-dependent labels.
TestPair rearrange_energy_increasing(const TestPair& p, const Grid& g);

/// At every (lateral node, speed node) sorts f_j nonincreasing in j; the
/// paired z-modes follow via labels, so the total density is unchanged.
TestPair rearrange_occupation_decreasing(const TestPair& p);

/// True when ||d_z chi_j||^2 is nondecreasing in j on every slice.
bool is_energy_sorted(const TestPair& p, const Grid& g);

} // namespace subband

#endif
