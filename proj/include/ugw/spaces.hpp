#pragma once

#include "ugw/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ugw {

enum class SpaceKind { ultrametric, ultra_dissimilarity };

std::string to_string(SpaceKind kind);
SpaceKind parse_space_kind(const std::string& text);

/// A finite ultra-dissimilarity measure space: labelled points, a symmetric
/// dissimilarity matrix and a fully supported probability vector. Ultrametric
/// measure spaces are the zero-diagonal case.
///
/// The constructor only checks shapes; the metric conditions are checked by
/// validate() so that invalid inputs can be loaded and reported on.
class UmSpace {
public:
    /// Empty `ids` selects the default labels.
    UmSpace(std::vector<std::string> ids, Matrix u, Vector mu);
    /// Labels default to "0", "1", ...
    UmSpace(Matrix u, Vector mu);

    std::size_t size() const { return static_cast<std::size_t>(mu_.size()); }
    const std::vector<std::string>& ids() const { return ids_; }
    const Matrix& u() const { return u_; }
    const Vector& mu() const { return mu_; }
    double u(std::size_t i, std::size_t j) const {
        return u_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    double mu(std::size_t i) const { return mu_(static_cast<Eigen::Index>(i)); }

    /// Largest entry of u (diam over the full support).
    double diameter() const;

private:
    std::vector<std::string> ids_;
    Matrix u_;
    Vector mu_;
};

/// Uniform probability vector of length n.
Vector uniform_mass(std::size_t n);

/// Equidistant space: n points, all pairwise distances d, uniform masses.
UmSpace equidistant_space(std::size_t n, double d);
/// Equidistant space with prescribed masses.
UmSpace equidistant_space(double d, Vector mu);
/// The one-point space.
UmSpace one_point_space();

struct Violation {
    /// "asymmetric", "negative", "strong_triangle", "nonzero_diagonal",
    /// "diagonal" (max(u_ii, u_jj) <= u_ij fails or is not strict).
    std::string kind;
    std::vector<std::size_t> indices;
    std::string detail;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
    /// Violations beyond the recorded list are counted but not stored.
    std::size_t total = 0;
};

/// Checks symmetry, the strong triangle inequality and the diagonal
/// condition. Ultrametric mode additionally demands a zero diagonal.
/// Throws ValidationError on shape mismatch, nonpositive or non-finite
/// masses, a mass sum away from 1, or non-finite dissimilarities.
ValidationReport validate(const UmSpace& space, SpaceKind mode,
                          std::size_t max_recorded = 64);

/// Throws ValidationError carrying the first violations when validate fails.
void require_valid(const UmSpace& space, SpaceKind mode, const std::string& context = {});

/// Weighted quotient of a space at level t.
struct QuotientSpace {
    double level = 0.0;
    /// Blocks ordered by smallest member; members ascending.
    std::vector<std::vector<std::size_t>> blocks;
    std::vector<std::size_t> block_of;
    UmSpace space;
};

/// Blocks are the classes of the transitive closure of u <= t + kMetricTol;
/// masses are summed per block and inter-block distances inherited from
/// the first members. The quotient has a zero diagonal.
QuotientSpace quotient(const UmSpace& space, double t);

/// Sorted distinct entries of u, deduplicated within kMetricTol.
std::vector<double> spectrum(const UmSpace& space);

/// Raises every dissimilarity to the power p >= 1.
UmSpace snowflake(const UmSpace& space, double p);

/// (sum_ij u_ij^p mu_i mu_j)^(1/p); p = infinity gives max u.
double diam_p(const UmSpace& space, double p);

/// Rooted merge tree. Internal nodes carry merge heights, leaves carry their
/// point index and birth height u_ii. Node 0 is the root.
struct DendrogramNode {
    double height = 0.0;
    double mass = 0.0;
    std::optional<std::size_t> point;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;

    bool is_leaf() const { return point.has_value(); }
};

class Dendrogram {
public:
    Dendrogram() = default;
    Dendrogram(std::vector<std::string> ids, std::vector<DendrogramNode> nodes);

    const std::vector<DendrogramNode>& nodes() const { return nodes_; }
    const DendrogramNode& node(std::size_t i) const { return nodes_[i]; }
    const DendrogramNode& root() const { return nodes_.front(); }
    const std::vector<std::string>& ids() const { return ids_; }
    std::size_t point_count() const { return ids_.size(); }
    /// Node index of the leaf holding point i.
    std::size_t leaf_of(std::size_t point) const { return leaf_of_[point]; }

    /// Point indices below node `n`, in tree order.
    std::vector<std::size_t> points_below(std::size_t n) const;
    /// Point indices in depth-first order.
    std::vector<std::size_t> leaf_order() const { return points_below(0); }

private:
    std::vector<std::string> ids_;
    std::vector<DendrogramNode> nodes_;
    std::vector<std::size_t> leaf_of_;
};

/// Builds the dendrogram (treegram for positive diagonals) of a valid
/// ultra-dissimilarity space. Merges at equal heights are collapsed into a
/// single multi-way node; children are ordered by canonical signature.
Dendrogram to_dendrogram(const UmSpace& space);

/// Induced space: off-diagonal entries are LCA heights, the diagonal holds
/// leaf birth heights, masses come from the leaves.
UmSpace from_dendrogram(const Dendrogram& dendrogram);

}  // namespace ugw
