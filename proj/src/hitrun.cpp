#include "ugw/gw.hpp"
#include "ugw/rng.hpp"
#include "ugw/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ugw {

namespace {

// Uniformly random unit direction in the subspace of m x n matrices with
// zero row and column sums: an isotropic Gaussian projected by double
// centring stays isotropic in that subspace.
Matrix random_direction(Eigen::Index m, Eigen::Index n, SplitMix64& rng) {
    Matrix z(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) z(i, j) = rng.normal();
    const Vector row_mean = z.rowwise().mean();
    const Eigen::RowVectorXd col_mean = z.colwise().mean();
    const double grand = z.mean();
    z.colwise() -= row_mean;
    z.rowwise() -= col_mean;
    z.array() += grand;
    const double norm = z.norm();
    if (norm > 0.0) z /= norm;
    return z;
}

}  // namespace

std::vector<Matrix> hitrun_couplings(const Vector& mu_x, const Vector& mu_y, std::size_t count,
                                     std::size_t steps, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("hitrun_couplings needs count >= 1");
    if (steps == 0) throw std::invalid_argument("hitrun_couplings needs steps >= 1");
    Matrix current = product_coupling(mu_x, mu_y);
    const Eigen::Index m = current.rows(), n = current.cols();
    if (m == 1 || n == 1) return std::vector<Matrix>(count, current);

    SplitMix64 rng(seed);
    std::vector<Matrix> out;
    out.reserve(count);
    while (out.size() < count) {
        for (std::size_t s = 0; s < steps; ++s) {
            const Matrix d = random_direction(m, n, rng);
            // Chord {current + g d : g in [lo, hi]} inside the nonnegative orthant.
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double dij = d(i, j);
                    if (dij > 0.0)
                        lo = std::max(lo, -current(i, j) / dij);
                    else if (dij < 0.0)
                        hi = std::min(hi, -current(i, j) / dij);
                }
            if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) continue;
            current += rng.uniform(lo, hi) * d;
            current = current.cwiseMax(0.0);
        }
        out.push_back(current);
    }
    return out;
}

}  // namespace ugw
