#include "ugw/transport.hpp"

#include "ot_solvers.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace ugw {

namespace {

using Rational = boost::multiprecision::cpp_rational;

void check_order(double p, const char* what) {
    if (!(p >= 1.0)) throw std::invalid_argument(std::string(what) + " requires p >= 1");
}

double snap(double diff) { return std::abs(diff) <= kMassTol ? 0.0 : std::abs(diff); }

void check_mass_vector(const Vector& v, std::size_t n, const char* name) {
    if (static_cast<std::size_t>(v.size()) != n)
        throw ValidationError(std::string(name) + " has length " + std::to_string(v.size()) +
                              ", expected " + std::to_string(n));
    if ((v.array() < 0.0).any() || !v.allFinite())
        throw ValidationError(std::string(name) + " has negative or non-finite entries");
    if (std::abs(v.sum() - 1.0) > 1e-9)
        throw ValidationError(std::string(name) + " does not sum to 1");
}

// Common support grid of two scalar measures.
struct Grid {
    std::vector<double> x, a, b;
};

Grid common_grid(const ScalarMeasure& alpha, const ScalarMeasure& beta) {
    struct Entry {
        double x, a, b;
    };
    std::vector<Entry> all;
    for (const auto& at : alpha.atoms()) all.push_back({at.x, at.mass, 0.0});
    for (const auto& at : beta.atoms()) all.push_back({at.x, 0.0, at.mass});
    std::sort(all.begin(), all.end(), [](const Entry& l, const Entry& r) { return l.x < r.x; });
    Grid g;
    for (const auto& e : all) {
        if (!g.x.empty() && e.x - g.x.back() <= kMetricTol) {
            g.a.back() += e.a;
            g.b.back() += e.b;
        } else {
            g.x.push_back(e.x);
            g.a.push_back(e.a);
            g.b.push_back(e.b);
        }
    }
    return g;
}

template <class T>
T to_number(double v) {
    return T(v);
}

template <class T>
double to_double(const T& v) {
    if constexpr (std::is_same_v<T, double>)
        return v;
    else
        return v.template convert_to<double>();
}

template <class T>
OtResult solve_sum(const Matrix& cost, const Vector& mu, const Vector& nu, T tolerance) {
    const auto m = static_cast<std::size_t>(cost.rows());
    const auto n = static_cast<std::size_t>(cost.cols());
    std::vector<T> supply(m), demand(n);
    for (std::size_t i = 0; i < m; ++i) supply[i] = to_number<T>(mu(static_cast<Eigen::Index>(i)));
    for (std::size_t j = 0; j < n; ++j) demand[j] = to_number<T>(nu(static_cast<Eigen::Index>(j)));
    detail::DenseGrid<T> grid(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            grid(i, j) = to_number<T>(cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    detail::TransportSimplex<T> simplex(std::move(supply), std::move(demand), tolerance);
    const T value = simplex.solve(grid);
    OtResult result;
    result.value = to_double(value);
    result.coupling.resize(cost.rows(), cost.cols());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            result.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                to_double(simplex.flow()(i, j));
    return result;
}

template <class T>
OtResult solve_max(const Matrix& cost, const Vector& mu, const Vector& nu, T epsilon) {
    const auto m = static_cast<std::size_t>(cost.rows());
    const auto n = static_cast<std::size_t>(cost.cols());
    std::vector<double> levels(cost.data(), cost.data() + cost.size());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    T need(0), supply_total(0), demand_total(0);
    for (std::size_t i = 0; i < m; ++i) supply_total += to_number<T>(mu(static_cast<Eigen::Index>(i)));
    for (std::size_t j = 0; j < n; ++j) demand_total += to_number<T>(nu(static_cast<Eigen::Index>(j)));
    need = supply_total < demand_total ? supply_total : demand_total;

    // Returns the coupling when the cells with cost <= level carry all mass.
    auto attempt = [&](double level, Matrix* out) {
        const std::size_t source = m + n, sink = m + n + 1;
        detail::MaxFlow<T> flow(m + n + 2);
        for (std::size_t i = 0; i < m; ++i)
            flow.add_edge(source, i, to_number<T>(mu(static_cast<Eigen::Index>(i))));
        for (std::size_t j = 0; j < n; ++j)
            flow.add_edge(m + j, sink, to_number<T>(nu(static_cast<Eigen::Index>(j))));
        std::vector<std::pair<std::size_t, std::size_t>> cells;
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= level) {
                    ids.push_back(flow.add_edge(i, m + j, supply_total + demand_total));
                    cells.emplace_back(i, j);
                }
        const T total = flow.run(source, sink, epsilon);
        if (total < need - epsilon * T(static_cast<double>(m + n))) return false;
        if (out) {
            *out = Matrix::Zero(cost.rows(), cost.cols());
            for (std::size_t k = 0; k < cells.size(); ++k)
                (*out)(static_cast<Eigen::Index>(cells[k].first),
                       static_cast<Eigen::Index>(cells[k].second)) = to_double(flow.flow_on(ids[k]));
        }
        return true;
    };

    std::size_t lo = 0, hi = levels.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (attempt(levels[mid], nullptr))
            hi = mid;
        else
            lo = mid + 1;
    }
    OtResult result;
    result.value = levels[lo];
    if (!attempt(levels[lo], &result.coupling))
        throw std::runtime_error("bottleneck transport: full support infeasible");
    return result;
}

}  // namespace

double lambda(double a, double b, double q) {
    check_order(q, "lambda");
    if (is_inf(q)) return std::abs(a - b) <= kMetricTol ? 0.0 : std::max(a, b);
    if (q == 1.0) return std::abs(a - b);
    return std::pow(std::abs(std::pow(a, q) - std::pow(b, q)), 1.0 / q);
}

ScalarMeasure::ScalarMeasure(const std::vector<double>& x, const std::vector<double>& mass) {
    if (x.size() != mass.size())
        throw ValidationError("scalar measure has " + std::to_string(x.size()) + " locations and " +
                              std::to_string(mass.size()) + " masses");
    std::vector<Atom> raw;
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || x[i] < 0.0)
            throw ValidationError("scalar measure locations must be finite and nonnegative");
        if (!std::isfinite(mass[i]) || mass[i] < 0.0)
            throw ValidationError("scalar measure masses must be finite and nonnegative");
        total += mass[i];
        if (mass[i] > 0.0) raw.push_back({x[i], mass[i]});
    }
    if (std::abs(total - 1.0) > kMassTol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "scalar measure has total mass " << total << ", expected 1";
        throw ValidationError(msg.str());
    }
    std::stable_sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    for (const auto& at : raw) {
        if (!atoms_.empty() && at.x - atoms_.back().x <= kMetricTol)
            atoms_.back().mass += at.mass;
        else
            atoms_.push_back(at);
    }
}

bool is_coupling(const Matrix& coupling, const Vector& mu, const Vector& nu, double tol) {
    if (coupling.rows() != mu.size() || coupling.cols() != nu.size()) return false;
    if ((coupling.array() < -tol).any()) return false;
    return (coupling.rowwise().sum() - mu).cwiseAbs().maxCoeff() <= tol &&
           (coupling.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff() <= tol;
}

Matrix product_coupling(const Vector& mu, const Vector& nu) { return mu * nu.transpose(); }

double w_ultrametric(const Dendrogram& dendrogram, const Vector& alpha, const Vector& beta,
                     double p) {
    check_order(p, "w_ultrametric");
    const std::size_t n = dendrogram.point_count();
    check_mass_vector(alpha, n, "alpha");
    check_mass_vector(beta, n, "beta");

    const auto& nodes = dendrogram.nodes();
    // Signed mass difference alpha(B) - beta(B) per node.
    std::vector<double> diff(nodes.size(), 0.0);
    std::function<double(std::size_t)> accumulate = [&](std::size_t i) {
        const auto& node = nodes[i];
        double d = 0.0;
        if (node.point) {
            const auto k = static_cast<Eigen::Index>(*node.point);
            d = alpha(k) - beta(k);
        }
        for (std::size_t c : node.children) d += accumulate(c);
        diff[i] = d;
        return d;
    };
    accumulate(0);

    if (is_inf(p)) {
        double best = 0.0;
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (snap(diff[i]) > 0.0) best = std::max(best, nodes[*nodes[i].parent].height);
        return best;
    }
    double total = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double parent_h = nodes[*nodes[i].parent].height;
        total += (std::pow(parent_h, p) - std::pow(nodes[i].height, p)) * snap(diff[i]);
    }
    return std::pow(0.5 * total, 1.0 / p);
}

double w_ultrametric(const UmSpace& space, const Vector& alpha, const Vector& beta, double p) {
    require_valid(space, SpaceKind::ultrametric, "w_ultrametric");
    return w_ultrametric(to_dendrogram(space), alpha, beta, p);
}

double w_halfline(const ScalarMeasure& alpha, const ScalarMeasure& beta, double p) {
    check_order(p, "w_halfline");
    const Grid g = common_grid(alpha, beta);
    const std::size_t k = g.x.size();
    if (is_inf(p)) {
        double best = 0.0, cum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            cum += g.a[i] - g.b[i];
            if (i + 1 < k && snap(cum) > 0.0) best = std::max(best, g.x[i + 1]);
            if (snap(g.a[i] - g.b[i]) > 0.0) best = std::max(best, g.x[i]);
        }
        return best;
    }
    double total = 0.0, cum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double xp = std::pow(g.x[i], p);
        cum += g.a[i] - g.b[i];
        if (i + 1 < k) total += snap(cum) * (std::pow(g.x[i + 1], p) - xp);
        total += snap(g.a[i] - g.b[i]) * xp;
    }
    return std::pow(0.5 * total, 1.0 / p);
}

double w_quantile(const ScalarMeasure& alpha, const ScalarMeasure& beta, double p, double q) {
    check_order(p, "w_quantile");
    check_order(q, "w_quantile");
    if (is_inf(q)) throw std::invalid_argument("w_quantile needs finite q; use w_halfline for Lambda_inf");
    if (q > p)
        throw RefusalError("w_quantile: q > p, the quantile coupling is only an upper bound there");
    const auto& a = alpha.atoms();
    const auto& b = beta.atoms();
    std::size_t i = 0, j = 0;
    double ra = a.empty() ? 0.0 : a[0].mass, rb = b.empty() ? 0.0 : b[0].mass;
    double total = 0.0, best = 0.0;
    while (i < a.size() && j < b.size()) {
        const double len = std::min(ra, rb);
        const double cost = lambda(a[i].x, b[j].x, q);
        if (is_inf(p)) {
            if (len > kMassTol) best = std::max(best, cost);
        } else {
            total += len * std::pow(cost, p);
        }
        ra -= len;
        rb -= len;
        if (ra <= 0.0 && ++i < a.size()) ra = a[i].mass;
        if (rb <= 0.0 && ++j < b.size()) rb = b[j].mass;
    }
    return is_inf(p) ? best : std::pow(total, 1.0 / p);
}

OtResult exact_ot(const Matrix& cost, const Vector& mu, const Vector& nu, OtMode mode,
                  Arithmetic arithmetic) {
    if (cost.rows() != mu.size() || cost.cols() != nu.size())
        throw ValidationError("cost matrix shape does not match the marginals");
    if (cost.size() == 0) throw ValidationError("empty transport problem");
    if (!cost.allFinite()) throw ValidationError("cost matrix has non-finite entries");
    if ((mu.array() < 0.0).any() || (nu.array() < 0.0).any())
        throw RefusalError("transport marginals must be nonnegative");
    if (std::abs(mu.sum() - nu.sum()) > kMassTol)
        throw RefusalError("infeasible transport: marginal totals differ");

    if (arithmetic == Arithmetic::rational) {
        if (cost.rows() > 16 || cost.cols() > 16)
            throw RefusalError("rational transport is limited to 16 x 16 problems");
        return mode == OtMode::sum ? solve_sum<Rational>(cost, mu, nu, Rational(0))
                                   : solve_max<Rational>(cost, mu, nu, Rational(0));
    }
    return mode == OtMode::sum ? solve_sum<double>(cost, mu, nu, 1e-12)
                               : solve_max<double>(cost, mu, nu, 1e-15);
}

}  // namespace ugw
