#include "ugw/bounds.hpp"

#include "ugw/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace ugw {

namespace {

void check_inputs(const UmSpace& x, const UmSpace& y, double p, const char* name) {
    if (!(p >= 1.0)) throw std::invalid_argument(std::string(name) + " requires p >= 1");
    require_valid(x, SpaceKind::ultra_dissimilarity, name);
    require_valid(y, SpaceKind::ultra_dissimilarity, name);
}

ScalarMeasure pushforward(const std::vector<double>& values, const Vector& mass) {
    return ScalarMeasure(values, std::vector<double>(mass.data(), mass.data() + mass.size()));
}

double w_classical(const ScalarMeasure& a, const ScalarMeasure& b, double p) {
    return w_quantile(a, b, p, 1.0);
}

double tlb_impl(const UmSpace& x, const UmSpace& y, double p, bool ultra, unsigned threads) {
    const Matrix omega = tlb_cost(x, y, p, ultra, threads);
    if (is_inf(p)) return exact_ot(omega, x.mu(), y.mu(), OtMode::max).value;
    const Matrix cost = omega.unaryExpr([p](double v) { return std::pow(v, p); });
    const double total = exact_ot(cost, x.mu(), y.mu(), OtMode::sum).value;
    return std::pow(std::max(total, 0.0), 1.0 / p);
}

}  // namespace

std::vector<double> eccentricities(const UmSpace& space, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("eccentricities require p >= 1");
    const std::size_t n = space.size();
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (is_inf(p)) {
            for (std::size_t k = 0; k < n; ++k) s[i] = std::max(s[i], space.u(i, k));
            continue;
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += std::pow(space.u(i, k), p) * space.mu(k);
        s[i] = std::pow(acc, 1.0 / p);
    }
    return s;
}

ScalarMeasure global_distance_distribution(const UmSpace& space) {
    const std::size_t n = space.size();
    std::vector<double> x, m;
    x.reserve(n * n);
    m.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            x.push_back(space.u(i, k));
            m.push_back(space.mu(i) * space.mu(k));
        }
    return ScalarMeasure(x, m);
}

ScalarMeasure local_distance_distribution(const UmSpace& space, std::size_t x) {
    const auto row = space.u().row(static_cast<Eigen::Index>(x));
    return pushforward(std::vector<double>(row.begin(), row.end()), space.mu());
}

double uflb(const UmSpace& x, const UmSpace& y, double p) {
    check_inputs(x, y, p, "uflb");
    return w_halfline(pushforward(eccentricities(x, p), x.mu()), pushforward(eccentricities(y, p), y.mu()), p);
}

double flb(const UmSpace& x, const UmSpace& y, double p) {
    check_inputs(x, y, p, "flb");
    return 0.5 * w_classical(pushforward(eccentricities(x, p), x.mu()),
                             pushforward(eccentricities(y, p), y.mu()), p);
}

double uslb(const UmSpace& x, const UmSpace& y, double p) {
    check_inputs(x, y, p, "uslb");
    return w_halfline(global_distance_distribution(x), global_distance_distribution(y), p);
}

double slb(const UmSpace& x, const UmSpace& y, double p) {
    check_inputs(x, y, p, "slb");
    return 0.5 * w_classical(global_distance_distribution(x), global_distance_distribution(y), p);
}

Matrix tlb_cost(const UmSpace& x, const UmSpace& y, double p, bool ultra, unsigned threads) {
    const std::size_t m = x.size(), n = y.size();
    std::vector<ScalarMeasure> lx, ly;
    for (std::size_t i = 0; i < m; ++i) lx.push_back(local_distance_distribution(x, i));
    for (std::size_t j = 0; j < n; ++j) ly.push_back(local_distance_distribution(y, j));
    Matrix omega(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    parallel_for(m * n, threads, [&](std::size_t cell) {
        const std::size_t i = cell / n, j = cell % n;
        omega(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            ultra ? w_halfline(lx[i], ly[j], p) : w_classical(lx[i], ly[j], p);
    });
    return omega;
}

double utlb(const UmSpace& x, const UmSpace& y, double p, unsigned threads) {
    check_inputs(x, y, p, "utlb");
    return tlb_impl(x, y, p, true, threads);
}

double tlb(const UmSpace& x, const UmSpace& y, double p, unsigned threads) {
    check_inputs(x, y, p, "tlb");
    return 0.5 * tlb_impl(x, y, p, false, threads);
}

Slb1Decomposition uslb1_decomposition(const UmSpace& x, const UmSpace& y) {
    const ScalarMeasure hx = global_distance_distribution(x);
    const ScalarMeasure hy = global_distance_distribution(y);
    Slb1Decomposition out{};
    out.uslb1 = uslb(x, y, 1.0);
    out.slb1 = slb(x, y, 1.0);

    // Signed difference of the two distributions on their merged support.
    std::vector<std::pair<double, double>> atoms;
    for (const auto& a : hx.atoms()) atoms.emplace_back(a.x, a.mass);
    for (const auto& a : hy.atoms()) atoms.emplace_back(a.x, -a.mass);
    std::sort(atoms.begin(), atoms.end());
    double total = 0.0;
    for (std::size_t k = 0; k < atoms.size();) {
        const double t = atoms[k].first;
        double diff = 0.0;
        while (k < atoms.size() && atoms[k].first - t <= kMetricTol) diff += atoms[k++].second;
        if (std::abs(diff) > kMassTol) total += t * std::abs(diff);
    }
    out.weighted_tv = 0.5 * total;
    return out;
}

}  // namespace ugw
