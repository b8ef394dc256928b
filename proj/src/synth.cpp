#include "ugw/synth.hpp"

#include "ugw/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ugw {

Matrix single_linkage(const Matrix& d) {
    const Eigen::Index n = d.rows();
    if (d.cols() != n) throw ValidationError("single_linkage needs a square matrix");
    Matrix u = Matrix::Zero(n, n);
    if (n == 0) return u;

    // Prim's algorithm; a newly attached vertex inherits the path maxima of
    // its MST parent.
    std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
    std::vector<double> best(static_cast<std::size_t>(n), kInf);
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> added;
    added.reserve(static_cast<std::size_t>(n));
    best[0] = 0.0;
    for (Eigen::Index step = 0; step < n; ++step) {
        Eigen::Index v = -1;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!in_tree[static_cast<std::size_t>(i)] && (v < 0 || best[static_cast<std::size_t>(i)] < best[static_cast<std::size_t>(v)]))
                v = i;
        in_tree[static_cast<std::size_t>(v)] = 1;
        if (step > 0) {
            const Eigen::Index p = parent[static_cast<std::size_t>(v)];
            const double w = best[static_cast<std::size_t>(v)];
            for (Eigen::Index x : added) {
                const double value = x == p ? w : std::max(u(p, x), w);
                u(v, x) = value;
                u(x, v) = value;
            }
        }
        added.push_back(v);
        for (Eigen::Index i = 0; i < n; ++i)
            if (!in_tree[static_cast<std::size_t>(i)] && d(v, i) < best[static_cast<std::size_t>(i)]) {
                best[static_cast<std::size_t>(i)] = d(v, i);
                parent[static_cast<std::size_t>(i)] = v;
            }
    }
    return u;
}

UmSpace gen_ultrametric(const GenSpec& spec) {
    if (spec.k == 0) throw ValidationError("gen: k must be at least 1");
    if (spec.samples_per_block == 0) throw ValidationError("gen: samples_per_block must be positive");
    const std::size_t total = spec.k * spec.samples_per_block;
    if (spec.subsample == 0 || spec.subsample > total)
        throw ValidationError("gen: subsample must lie in [1, k * samples_per_block]");

    SplitMix64 rng(spec.seed);
    std::vector<double> sample;
    sample.reserve(total);
    for (std::size_t i = 1; i <= spec.k; ++i) {
        const double lo = 1.5 * static_cast<double>(i - 1);
        for (std::size_t s = 0; s < spec.samples_per_block; ++s) sample.push_back(rng.uniform(lo, lo + 1.0));
    }

    // Partial Fisher-Yates: the first `subsample` entries are a uniform draw
    // without replacement.
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < spec.subsample; ++i) std::swap(order[i], order[i + rng.below(total - i)]);
    order.resize(spec.subsample);
    std::sort(order.begin(), order.end());

    // Single linkage on the line only joins neighbours in sorted order, so
    // the cophenetic value is the largest gap between two points.
    std::vector<std::size_t> rank(total);
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return sample[a] < sample[b]; });
    std::vector<std::size_t> position(total);
    for (std::size_t r = 0; r < total; ++r) position[rank[r]] = r;
    std::vector<double> gap(total, 0.0);
    for (std::size_t r = 1; r < total; ++r) gap[r] = sample[rank[r]] - sample[rank[r - 1]];

    const auto n = static_cast<Eigen::Index>(spec.subsample);
    Matrix u = Matrix::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b) {
            std::size_t lo = position[order[static_cast<std::size_t>(a)]];
            std::size_t hi = position[order[static_cast<std::size_t>(b)]];
            if (lo > hi) std::swap(lo, hi);
            const double v = *std::max_element(gap.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                                               gap.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
            u(a, b) = v;
            u(b, a) = v;
        }
    return UmSpace(std::move(u), uniform_mass(spec.subsample));
}

UmSpace perturb(const UmSpace& space, double t, std::uint64_t seed) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("perturb: t must be finite and >= 0");
    require_valid(space, SpaceKind::ultrametric, "perturb");
    const QuotientSpace q = quotient(space, t);
    Matrix u = space.u();
    SplitMix64 rng(seed);
    for (const auto& block : q.blocks) {
        if (block.size() < 2) continue;
        std::vector<double> values;
        double diam = 0.0;
        for (std::size_t a : block)
            for (std::size_t b : block)
                if (a != b) {
                    values.push_back(space.u(a, b));
                    diam = std::max(diam, space.u(a, b));
                }
        std::sort(values.begin(), values.end());
        std::vector<double> levels;
        for (double v : values)
            if (levels.empty() || v - levels.back() > kMetricTol) levels.push_back(v);

        const double room = std::max(0.0, t - diam);
        std::vector<double> shift(levels.size());
        for (double& a : shift) a = rng.uniform(0.0, room);
        std::sort(shift.begin(), shift.end());

        for (std::size_t a : block)
            for (std::size_t b : block) {
                if (a == b) continue;
                const double v = space.u(a, b);
                const auto it = std::upper_bound(levels.begin(), levels.end(), v + kMetricTol);
                u(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    v + shift[static_cast<std::size_t>(it - levels.begin()) - 1];
            }
    }
    return UmSpace(space.ids(), std::move(u), space.mu());
}

}  // namespace ugw
