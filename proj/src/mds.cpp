#include "ugw/mds.hpp"

#include <algorithm>
#include <cmath>

namespace ugw {

MdsResult classical_mds(const Matrix& d, std::size_t dim) {
    const Eigen::Index n = d.rows();
    if (d.cols() != n || n == 0) throw ValidationError("mds needs a non-empty square matrix");
    if (dim == 0 || dim > static_cast<std::size_t>(n))
        throw ValidationError("mds: dim must lie in [1, " + std::to_string(n) + "]");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) throw ValidationError("mds: entries must be finite and >= 0");
            if (std::abs(d(i, j) - d(j, i)) > kMetricTol) throw ValidationError("mds: matrix is not symmetric");
        }

    const Matrix sq = d.array().square().matrix();
    const Matrix centre = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    Matrix b = -0.5 * centre * sq * centre;
    b = 0.5 * (b + b.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> solver(b);
    if (solver.info() != Eigen::Success) throw Error("mds: eigendecomposition failed");

    MdsResult out;
    const auto k = static_cast<Eigen::Index>(dim);
    out.coordinates.resize(n, k);
    out.eigenvalues.resize(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        // Eigen sorts ascending.
        const Eigen::Index src = n - 1 - c;
        const double lambda = solver.eigenvalues()(src);
        out.eigenvalues(c) = lambda;
        // Round-off negatives of a Euclidean matrix are clamped silently.
        if (lambda < -1e-12 * std::max(1.0, std::abs(solver.eigenvalues()(n - 1)))) {
            out.warnings.push_back("eigenvalue " + std::to_string(c + 1) + " is negative (" + std::to_string(lambda) +
                                   "); clamped to 0");
        }
        Vector v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        out.coordinates.col(c) = v * std::sqrt(std::max(lambda, 0.0));
    }
    return out;
}

}  // namespace ugw
