#pragma once

#include "ugw/common.hpp"

#include <string>
#include <vector>

namespace ugw {

struct MdsResult {
    /// n x dim coordinates.
    Matrix coordinates;
    /// Top eigenvalues of the double-centred -1/2 D^2, descending, before clamping.
    Vector eigenvalues;
    std::vector<std::string> warnings;
};

/// Classical multidimensional scaling. Negative eigenvalues among the kept
/// ones are clamped to 0 with a warning. Each axis is oriented so that its
/// largest-magnitude coordinate is positive. Throws ValidationError for a
/// non-square, asymmetric or negative matrix, or dim outside [1, n].
MdsResult classical_mds(const Matrix& d, std::size_t dim);

}  // namespace ugw
