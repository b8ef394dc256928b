#include "ugw/gw.hpp"

#include "ot_solvers.hpp"
#include "ugw/canonical.hpp"
#include "ugw/parallel.hpp"
#include "ugw/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ugw {

namespace {

void check_coupling_shape(const UmSpace& x, const UmSpace& y, const Matrix& coupling) {
    if (static_cast<std::size_t>(coupling.rows()) != x.size() ||
        static_cast<std::size_t>(coupling.cols()) != y.size())
        throw ValidationError("coupling shape does not match the spaces");
    if (!is_coupling(coupling, x.mu(), y.mu(), 1e-9))
        throw ValidationError("coupling marginals do not match mu_X and mu_Y");
}

// Evaluates c(uX(i,k), uY(j,l))^p for one cost kind with the powers of the
// inputs cached.
class CostKernel {
public:
    CostKernel(const UmSpace& x, const UmSpace& y, double p, CostKind kind)
        : x_(x.u()), y_(y.u()), p_(p), kind_(kind) {
        if (kind_ == CostKind::ultra) {
            px_ = x_.unaryExpr([p](double v) { return std::pow(v, p); });
            py_ = y_.unaryExpr([p](double v) { return std::pow(v, p); });
        }
    }

    double operator()(Eigen::Index i, Eigen::Index k, Eigen::Index j, Eigen::Index l) const {
        const double a = x_(i, k), b = y_(j, l);
        if (kind_ == CostKind::ultra) {
            if (std::abs(a - b) <= kMetricTol) return 0.0;
            return std::max(px_(i, k), py_(j, l));
        }
        const double d = std::abs(a - b);
        if (p_ == 1.0) return d;
        if (p_ == 2.0) return d * d;
        return std::pow(d, p_);
    }

    /// H_ij = sum_kl c(i,k,j,l) M_kl, skipping zero entries of M.
    Matrix apply(const Matrix& m) const {
        std::vector<std::pair<Eigen::Index, Eigen::Index>> support;
        for (Eigen::Index k = 0; k < m.rows(); ++k)
            for (Eigen::Index l = 0; l < m.cols(); ++l)
                if (m(k, l) != 0.0) support.emplace_back(k, l);
        Matrix h(x_.rows(), y_.rows());
        for (Eigen::Index i = 0; i < x_.rows(); ++i)
            for (Eigen::Index j = 0; j < y_.rows(); ++j) {
                double acc = 0.0;
                for (const auto& [k, l] : support) acc += (*this)(i, k, j, l) * m(k, l);
                h(i, j) = acc;
            }
        return h;
    }

private:
    const Matrix& x_;
    const Matrix& y_;
    double p_;
    CostKind kind_;
    Matrix px_, py_;
};

double distortion(const UmSpace& x, const UmSpace& y, const Matrix& coupling, double p,
                  CostKind kind) {
    check_coupling_shape(x, y, coupling);
    if (!(p >= 1.0)) throw std::invalid_argument("distortion requires p >= 1");
    const Eigen::Index m = coupling.rows(), n = coupling.cols();
    if (is_inf(p)) {
        std::vector<std::pair<Eigen::Index, Eigen::Index>> support;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (coupling(i, j) > kMassTol) support.emplace_back(i, j);
        double best = 0.0;
        for (const auto& [i, j] : support)
            for (const auto& [k, l] : support) {
                const double a = x.u()(i, k), b = y.u()(j, l);
                best = std::max(best, kind == CostKind::ultra ? lambda(a, b, kInf) : std::abs(a - b));
            }
        return best;
    }
    const CostKernel kernel(x, y, p, kind);
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double row = 0.0;
            for (Eigen::Index k = 0; k < m; ++k)
                for (Eigen::Index l = 0; l < n; ++l) row += kernel(i, k, j, l) * coupling(k, l);
            total += coupling(i, j) * row;
        }
    return std::pow(std::max(total, 0.0), 1.0 / p);
}

std::vector<double> merged_levels(const UmSpace& x, const UmSpace& y) {
    auto levels = spectrum(x);
    const auto sy = spectrum(y);
    levels.insert(levels.end(), sy.begin(), sy.end());
    std::sort(levels.begin(), levels.end());
    std::vector<double> merged;
    for (double v : levels)
        if (merged.empty() || v - merged.back() > kMetricTol) merged.push_back(v);
    std::reverse(merged.begin(), merged.end());
    return merged;
}

bool quotients_isomorphic(const UmSpace& x, const UmSpace& y, double t, bool with_mass) {
    const auto qx = quotient(x, t), qy = quotient(y, t);
    if (qx.blocks.size() != qy.blocks.size()) return false;
    const CanonicalOptions options{.with_mass = with_mass, .with_ids = false};
    return canonical_form(to_dendrogram(qx.space), options) ==
           canonical_form(to_dendrogram(qy.space), options);
}

GwResult quotient_sweep(const UmSpace& x, const UmSpace& y, bool with_mass) {
    const char* name = with_mass ? "ugw-inf" : "ugh";
    require_valid(x, SpaceKind::ultrametric, name);
    require_valid(y, SpaceKind::ultrametric, name);
    const auto levels = merged_levels(x, y);
    double value = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (quotients_isomorphic(x, y, levels[i], with_mass)) continue;
        // The top level collapses both spaces to one point of mass 1.
        if (i == 0) throw std::logic_error("quotient sweep failed at the top level");
        value = levels[i - 1];
        break;
    }

    GwResult result;
    result.method = name;
    result.value = value;
    result.level = value;

    // Certificate: match the blocks at the critical level through the
    // canonical leaf orders of the two quotient dendrograms.
    const auto qx = quotient(x, value), qy = quotient(y, value);
    const CanonicalOptions options{.with_mass = with_mass, .with_ids = false};
    const auto ox = canonical_leaf_order(to_dendrogram(qx.space), options);
    const auto oy = canonical_leaf_order(to_dendrogram(qy.space), options);
    for (std::size_t k = 0; k < ox.size(); ++k)
        result.matching.emplace_back(qx.blocks[ox[k]].front(), qy.blocks[oy[k]].front());
    if (with_mass) {
        Matrix coupling = Matrix::Zero(static_cast<Eigen::Index>(x.size()),
                                       static_cast<Eigen::Index>(y.size()));
        for (std::size_t k = 0; k < ox.size(); ++k) {
            const auto& bx = qx.blocks[ox[k]];
            const auto& by = qy.blocks[oy[k]];
            const double mass_y = qy.space.mu(oy[k]);
            for (std::size_t a : bx)
                for (std::size_t b : by)
                    coupling(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                        x.mu(a) * y.mu(b) / mass_y;
        }
        result.coupling = std::move(coupling);
    }
    return result;
}

double quadratic_min_step(double a, double b) {
    // argmin over [0, 1] of a g^2 + b g.
    if (a > 0.0) return std::clamp(-b / (2.0 * a), 0.0, 1.0);
    return a + b < 0.0 ? 1.0 : 0.0;
}

struct RestartOutcome {
    Matrix coupling;
    double value;
};

RestartOutcome frank_wolfe(const UmSpace& x, const UmSpace& y, double p, const FwConfig& config,
                           CostKind kind, Matrix coupling) {
    const CostKernel kernel(x, y, p, kind);
    const auto m = static_cast<std::size_t>(x.size());
    const auto n = static_cast<std::size_t>(y.size());
    std::vector<double> supply(x.mu().data(), x.mu().data() + m);
    std::vector<double> demand(y.mu().data(), y.mu().data() + n);
    detail::TransportSimplex<double> simplex(std::move(supply), std::move(demand), 1e-12);
    detail::DenseGrid<double> grid(m, n);

    Matrix h = kernel.apply(coupling);  // gradient / 2
    for (std::size_t it = 1; it <= config.iterations; ++it) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                grid(i, j) = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        simplex.solve(grid);
        Matrix target(coupling.rows(), coupling.cols());
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                target(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = simplex.flow()(i, j);

        const Matrix direction = target - coupling;
        const double slope = 2.0 * (direction.array() * h.array()).sum();  // <G, D>
        if (-slope <= config.tol_stationarity) break;
        const Matrix h_direction = kernel.apply(target) - h;
        double step;
        if (config.step_rule == StepRule::harmonic) {
            step = 2.0 / (static_cast<double>(it) + 2.0);
        } else {
            const double curvature = (direction.array() * h_direction.array()).sum();
            step = quadratic_min_step(curvature, slope);
        }
        if (step <= 0.0) break;
        coupling += step * direction;
        coupling = coupling.cwiseMax(0.0);
        h += step * h_direction;
    }
    const double value = kind == CostKind::ultra ? dis_ult(x, y, coupling, p)
                                                 : 0.5 * dis_classical(x, y, coupling, p);
    return {std::move(coupling), value};
}

}  // namespace

double dis_ult(const UmSpace& x, const UmSpace& y, const Matrix& coupling, double p) {
    return distortion(x, y, coupling, p, CostKind::ultra);
}

double dis_classical(const UmSpace& x, const UmSpace& y, const Matrix& coupling, double p) {
    return distortion(x, y, coupling, p, CostKind::classical);
}

Matrix distortion_gradient(const UmSpace& x, const UmSpace& y, const Matrix& coupling, double p,
                           CostKind kind) {
    if (!(p >= 1.0) || is_inf(p)) throw std::invalid_argument("gradient requires finite p >= 1");
    if (static_cast<std::size_t>(coupling.rows()) != x.size() ||
        static_cast<std::size_t>(coupling.cols()) != y.size())
        throw ValidationError("coupling shape does not match the spaces");
    return 2.0 * CostKernel(x, y, p, kind).apply(coupling);
}

std::vector<LevelCheck> quotient_profile(const UmSpace& x, const UmSpace& y, bool with_mass) {
    std::vector<LevelCheck> out;
    for (double t : merged_levels(x, y)) out.push_back({t, quotients_isomorphic(x, y, t, with_mass)});
    return out;
}

GwResult ugw_inf_exact(const UmSpace& x, const UmSpace& y) { return quotient_sweep(x, y, true); }

GwResult ugh_exact(const UmSpace& x, const UmSpace& y) { return quotient_sweep(x, y, false); }

GwResult ugw_fw(const UmSpace& x, const UmSpace& y, double p, const FwConfig& config, CostKind kind) {
    if (!(p >= 1.0)) throw std::invalid_argument("ugw_fw requires p >= 1");
    if (is_inf(p)) throw std::invalid_argument("ugw_fw needs finite p; use ugw_inf_exact for p = inf");
    if (config.restarts == 0 || config.iterations == 0)
        throw std::invalid_argument("ugw_fw needs at least one restart and one iteration");
    const SpaceKind mode = SpaceKind::ultra_dissimilarity;
    require_valid(x, mode, "ugw_fw");
    require_valid(y, mode, "ugw_fw");

    std::vector<Matrix> starts{product_coupling(x.mu(), y.mu())};
    if (config.restarts > 1) {
        auto more = hitrun_couplings(x.mu(), y.mu(), config.restarts - 1,
                                     std::max<std::size_t>(1, config.hitrun_steps), config.seed);
        for (auto& c : more) starts.push_back(std::move(c));
    }

    std::vector<RestartOutcome> outcomes(starts.size());
    parallel_for(starts.size(), config.threads, [&](std::size_t r) {
        outcomes[r] = frank_wolfe(x, y, p, config, kind, std::move(starts[r]));
    });

    GwResult result;
    result.method = kind == CostKind::ultra ? "ugw-fw" : "dgw-fw";
    std::size_t best = 0;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        result.trace.push_back(outcomes[r].value);
        if (outcomes[r].value < outcomes[best].value) best = r;
    }
    result.value = outcomes[best].value;
    result.coupling = std::move(outcomes[best].coupling);
    return result;
}

}  // namespace ugw
