#pragma once

#include "ugw/common.hpp"
#include "ugw/spaces.hpp"

#include <utility>
#include <vector>

namespace ugw {

/// Lambda_q(a, b) = |a^q - b^q|^(1/q); Lambda_inf(a, b) = max(a, b) unless
/// |a - b| <= kMetricTol, in which case 0. Throws for q < 1.
double lambda(double a, double b, double q);

/// Finitely supported probability measure on [0, inf).
class ScalarMeasure {
public:
    struct Atom {
        double x;
        double mass;
    };

    /// Sorts atoms, merges locations closer than kMetricTol (mass-summed,
    /// first location kept) and drops zero-mass atoms. Throws
    /// ValidationError on negative locations or masses, or a total away
    /// from 1 by more than kMassTol.
    ScalarMeasure(const std::vector<double>& x, const std::vector<double>& mass);
    static ScalarMeasure dirac(double x) { return ScalarMeasure({x}, {1.0}); }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

private:
    std::vector<Atom> atoms_;
};

/// Checks that `coupling` is nonnegative (down to -tol) with the given
/// marginals within `tol`.
bool is_coupling(const Matrix& coupling, const Vector& mu, const Vector& nu, double tol = 1e-10);

Matrix product_coupling(const Vector& mu, const Vector& nu);

/// Wasserstein distance of order p in [1, inf] between mass vectors on an
/// ultrametric space, evaluated on its dendrogram: for p < inf
/// (1/2 sum_B (h(parent B)^p - h(B)^p) |alpha(B) - beta(B)|)^(1/p) over
/// non-root nodes B; for p = inf the largest parent height over nodes whose
/// masses differ by more than kMassTol.
double w_ultrametric(const UmSpace& space, const Vector& alpha, const Vector& beta, double p);
double w_ultrametric(const Dendrogram& dendrogram, const Vector& alpha, const Vector& beta,
                     double p);

/// Wasserstein distance of order p in [1, inf] on ([0, inf), Lambda_inf).
/// Cumulative and pointwise mass differences within kMassTol count as 0.
double w_halfline(const ScalarMeasure& alpha, const ScalarMeasure& beta, double p);

/// Wasserstein distance of order p on ([0, inf), Lambda_q) for 1 <= q <= p
/// by integrating Lambda_q(F_alpha^-1(t), F_beta^-1(t))^p over t in [0, 1].
/// p = inf gives the supremum. Throws RefusalError when q > p: the quantile
/// coupling is then only an upper bound.
double w_quantile(const ScalarMeasure& alpha, const ScalarMeasure& beta, double p, double q);

enum class OtMode { sum, max };
enum class Arithmetic { floating, rational };

struct OtResult {
    double value = 0.0;
    Matrix coupling;
};

/// Exact discrete optimal transport. Sum mode minimises <cost, coupling>
/// with the transportation simplex; max mode returns the smallest
/// bottleneck value sup{cost(i,j) : coupling(i,j) > 0} by binary search
/// over the distinct costs with max-flow feasibility. Rational arithmetic
/// (sum mode, at most 16 rows and columns) reproduces the floating solver
/// drift-free. Throws RefusalError when the marginals disagree beyond
/// kMassTol or a marginal is negative.
OtResult exact_ot(const Matrix& cost, const Vector& mu, const Vector& nu,
                  OtMode mode = OtMode::sum, Arithmetic arithmetic = Arithmetic::floating);

}  // namespace ugw
