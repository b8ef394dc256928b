#pragma once

#include "ugw/spaces.hpp"

#include <cstdint>

namespace ugw {

struct GenSpec {
    std::size_t k = 1;
    std::size_t samples_per_block = 100;
    std::size_t subsample = 30;
    std::uint64_t seed = 0;
};

/// Cophenetic ultrametric of single-linkage clustering on a dissimilarity
/// matrix: u(a, b) is the largest edge on the minimum spanning tree path.
Matrix single_linkage(const Matrix& d);

/// Draws samples_per_block points from each of U[1.5(i-1), 1.5(i-1) + 1],
/// i = 1..k, takes the single-linkage ultrametric of their absolute
/// differences and keeps a uniformly drawn subsample (without replacement)
/// with the uniform measure.
UmSpace gen_ultrametric(const GenSpec& spec);

/// Perturbs an ultrametric space below level t: inside every level-t block
/// with more than one point, the nonzero spectrum values s_1 < ... < s_m of
/// the block are replaced by s_i + a_i, where a_1 <= ... <= a_m are sorted
/// uniforms on [0, t - diam(block)]. The level-t quotient is unchanged.
UmSpace perturb(const UmSpace& space, double t, std::uint64_t seed);

}  // namespace ugw
