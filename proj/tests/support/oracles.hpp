#pragma once

// Slow, independent reference implementations used by the unit tests and
// the acceptance runner.

#include "ugw/gw.hpp"
#include "ugw/spaces.hpp"
#include "ugw/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

namespace testing {

using ugw::Matrix;
using ugw::UmSpace;
using ugw::Vector;

inline double ultra_cost(double a, double b) { return std::abs(a - b) <= 1e-12 ? 0.0 : std::max(a, b); }

/// sum_{ijkl} c(uX(i,k), uY(j,l))^p pi_ij pi_kl for an arbitrary matrix pi
/// (no marginal checks, so it can be differentiated numerically).
inline double distortion_functional(const UmSpace& x, const UmSpace& y, const Matrix& pi, double p, bool ultra) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < pi.rows(); ++i)
        for (Eigen::Index j = 0; j < pi.cols(); ++j)
            for (Eigen::Index k = 0; k < pi.rows(); ++k)
                for (Eigen::Index l = 0; l < pi.cols(); ++l) {
                    const double a = x.u(static_cast<std::size_t>(i), static_cast<std::size_t>(k));
                    const double b = y.u(static_cast<std::size_t>(j), static_cast<std::size_t>(l));
                    total += std::pow(ultra ? ultra_cost(a, b) : std::abs(a - b), p) * pi(i, j) * pi(k, l);
                }
    return total;
}

/// Blocks of u <= t by union-find, labelled by first member order.
inline std::vector<std::size_t> level_blocks(const UmSpace& s, double t, std::size_t& count) {
    const std::size_t n = s.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (s.u(i, j) <= t + 1e-9) parent[find(i)] = find(j);
    std::vector<std::size_t> label(n, n), out(n);
    count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (label[r] == n) label[r] = count++;
        out[i] = label[r];
    }
    return out;
}

/// Exhaustive search for a block bijection between the level-t quotients
/// preserving inter-block values (and masses when `with_mass`). Returns the
/// induced coupling (product measure inside matched blocks) on success.
inline std::optional<Matrix> block_matching(const UmSpace& x, const UmSpace& y, double t, bool with_mass) {
    std::size_t bx = 0, by = 0;
    const auto lx = level_blocks(x, t, bx), ly = level_blocks(y, t, by);
    if (bx != by) return std::nullopt;
    std::vector<double> mx(bx, 0.0), my(by, 0.0);
    std::vector<std::size_t> rx(bx), ry(by);
    for (std::size_t i = x.size(); i-- > 0;) {
        mx[lx[i]] += x.mu(i);
        rx[lx[i]] = i;
    }
    for (std::size_t j = y.size(); j-- > 0;) {
        my[ly[j]] += y.mu(j);
        ry[ly[j]] = j;
    }
    std::vector<std::size_t> sigma(bx);
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
        bool ok = true;
        for (std::size_t a = 0; a < bx && ok; ++a) {
            if (with_mass && std::abs(mx[a] - my[sigma[a]]) > 1e-9) ok = false;
            for (std::size_t b = a + 1; b < bx && ok; ++b)
                if (std::abs(x.u(rx[a], rx[b]) - y.u(ry[sigma[a]], ry[sigma[b]])) > 1e-9) ok = false;
        }
        if (!ok) continue;
        Matrix pi = Matrix::Zero(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
        if (with_mass)
            for (std::size_t i = 0; i < x.size(); ++i)
                for (std::size_t j = 0; j < y.size(); ++j)
                    if (sigma[lx[i]] == ly[j])
                        pi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x.mu(i) * y.mu(j) / my[ly[j]];
        return pi;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return std::nullopt;
}

/// Smallest candidate level (0 or an off-diagonal value of either space)
/// at which an exhaustive block matching exists.
inline double ugw_inf_bruteforce(const UmSpace& x, const UmSpace& y, bool with_mass = true) {
    std::vector<double> levels{0.0};
    for (const UmSpace* s : {&x, &y})
        for (std::size_t i = 0; i < s->size(); ++i)
            for (std::size_t j = i + 1; j < s->size(); ++j) levels.push_back(s->u(i, j));
    std::sort(levels.begin(), levels.end());
    for (double t : levels)
        if (block_matching(x, y, t, with_mass)) return t;
    return levels.back();
}

}  // namespace testing
