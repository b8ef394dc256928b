#include "ugw/gw.hpp"
#include "ugw/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace ugw {

namespace {

using Embedding = std::vector<std::pair<std::size_t, std::size_t>>;

bool same(double a, double b) { return std::abs(a - b) <= kMetricTol; }

// All isometric partial injections X -> Y that cannot be extended.
std::vector<Embedding> maximal_pairs(const UmSpace& x, const UmSpace& y) {
    const std::size_t m = x.size(), n = y.size();
    std::vector<std::size_t> image(m, n);  // n = unmapped
    std::vector<char> used(n, 0);
    std::vector<Embedding> out;

    auto compatible = [&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < m; ++c)
            if (image[c] != n && c != a && !same(x.u(a, c), y.u(b, image[c]))) return false;
        return true;
    };

    std::function<void(std::size_t)> extend = [&](std::size_t a) {
        if (a == m) {
            for (std::size_t c = 0; c < m; ++c) {
                if (image[c] != n) continue;
                for (std::size_t b = 0; b < n; ++b)
                    if (!used[b] && compatible(c, b)) return;
            }
            Embedding e;
            for (std::size_t c = 0; c < m; ++c)
                if (image[c] != n) e.emplace_back(c, image[c]);
            if (!e.empty()) out.push_back(std::move(e));
            return;
        }
        for (std::size_t b = 0; b < n; ++b) {
            if (used[b] || !compatible(a, b)) continue;
            image[a] = b;
            used[b] = 1;
            extend(a + 1);
            used[b] = 0;
            image[a] = n;
        }
        extend(a + 1);
    };
    extend(0);
    return out;
}

}  // namespace

Amalgam sturm_amalgam(const UmSpace& x, const UmSpace& y, const Embedding& embedding) {
    const std::size_t m = x.size(), n = y.size();
    std::vector<std::size_t> image(m, n);
    std::vector<std::size_t> preimage(n, m);
    for (const auto& [a, b] : embedding) {
        if (a >= m || b >= n) throw std::out_of_range("embedding index out of range");
        image[a] = b;
        preimage[b] = a;
    }
    std::vector<std::size_t> y_index(n);
    std::vector<std::size_t> rest;  // Y \ phi(A)
    for (std::size_t b = 0; b < n; ++b) {
        if (preimage[b] != m) {
            y_index[b] = preimage[b];
        } else {
            y_index[b] = m + rest.size();
            rest.push_back(b);
        }
    }
    const std::size_t size = m + rest.size();
    const auto sz = static_cast<Eigen::Index>(size);
    Matrix u = Matrix::Zero(sz, sz);
    auto set = [&](std::size_t i, std::size_t j, double v) {
        u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) set(i, j, x.u(i, j));
    for (std::size_t r = 0; r < rest.size(); ++r)
        for (std::size_t s = r + 1; s < rest.size(); ++s) set(m + r, m + s, y.u(rest[r], rest[s]));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < rest.size(); ++r) {
            const std::size_t b = rest[r];
            double v;
            if (image[i] != n) {
                v = y.u(b, image[i]);
            } else {
                v = std::numeric_limits<double>::infinity();
                for (const auto& [a, phi_a] : embedding)
                    v = std::min(v, std::max(x.u(i, a), y.u(phi_a, b)));
            }
            set(i, m + r, v);
        }

    Vector alpha = Vector::Zero(sz), beta = Vector::Zero(sz);
    for (std::size_t i = 0; i < m; ++i) alpha(static_cast<Eigen::Index>(i)) = x.mu(i);
    for (std::size_t b = 0; b < n; ++b) beta(static_cast<Eigen::Index>(y_index[b])) += y.mu(b);
    std::vector<std::string> ids = x.ids();
    for (std::size_t b : rest) ids.push_back("y:" + y.ids()[b]);
    return Amalgam{UmSpace(std::move(ids), std::move(u), uniform_mass(size)), std::move(alpha),
                   std::move(beta), std::move(y_index)};
}

GwResult usturm_bruteforce(const UmSpace& x, const UmSpace& y, double p, std::size_t max_points) {
    if (!(p >= 1.0)) throw std::invalid_argument("usturm requires p >= 1");
    if (x.size() > max_points || y.size() > max_points)
        throw RefusalError("usturm_bruteforce: spaces with more than " + std::to_string(max_points) +
                           " points need exponential enumeration; refusing");
    require_valid(x, SpaceKind::ultrametric, "usturm");
    require_valid(y, SpaceKind::ultrametric, "usturm");

    GwResult result;
    result.method = "usturm-bruteforce";
    result.value = std::numeric_limits<double>::infinity();
    for (const auto& embedding : maximal_pairs(x, y)) {
        const Amalgam z = sturm_amalgam(x, y, embedding);
        const double w = w_ultrametric(to_dendrogram(z.space), z.alpha, z.beta, p);
        if (w < result.value) {
            result.value = w;
            result.matching = embedding;
        }
    }
    return result;
}

}  // namespace ugw
