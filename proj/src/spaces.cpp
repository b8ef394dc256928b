#include "ugw/spaces.hpp"

#include "ugw/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace ugw {

namespace {

std::vector<std::string> default_ids(std::size_t n) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return ids;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

// Groups `members` into the classes of the closure of `linked`, ordered by
// first member.
template <class Linked>
std::vector<std::vector<std::size_t>> components(const std::vector<std::size_t>& members,
                                                 Linked linked) {
    UnionFind uf(members.size());
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            if (linked(members[a], members[b])) uf.unite(a, b);
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> slot(members.size(), members.size());
    for (std::size_t a = 0; a < members.size(); ++a) {
        const std::size_t r = uf.find(a);
        if (slot[r] == members.size()) {
            slot[r] = groups.size();
            groups.emplace_back();
        }
        groups[slot[r]].push_back(members[a]);
    }
    return groups;
}

}  // namespace

std::string to_string(SpaceKind kind) {
    return kind == SpaceKind::ultrametric ? "ultrametric" : "ultra_dissimilarity";
}

SpaceKind parse_space_kind(const std::string& text) {
    if (text == "ultrametric") return SpaceKind::ultrametric;
    if (text == "ultra_dissimilarity" || text == "ultra-dissimilarity")
        return SpaceKind::ultra_dissimilarity;
    throw ValidationError("unknown space kind '" + text + "'");
}

UmSpace::UmSpace(std::vector<std::string> ids, Matrix u, Vector mu)
    : ids_(std::move(ids)), u_(std::move(u)), mu_(std::move(mu)) {
    if (ids_.empty()) ids_ = default_ids(size());
    if (u_.rows() != u_.cols())
        throw ValidationError("dissimilarity matrix is " + std::to_string(u_.rows()) + "x" +
                              std::to_string(u_.cols()) + ", expected square");
    if (u_.rows() != mu_.size())
        throw ValidationError("mass vector has length " + std::to_string(mu_.size()) +
                              " but the matrix has " + std::to_string(u_.rows()) + " rows");
    if (ids_.size() != size())
        throw ValidationError("got " + std::to_string(ids_.size()) + " ids for " +
                              std::to_string(size()) + " points");
    if (size() == 0) throw ValidationError("space has no points");
}

UmSpace::UmSpace(Matrix u, Vector mu)
    : UmSpace(std::vector<std::string>{}, std::move(u), std::move(mu)) {}

double UmSpace::diameter() const { return u_.maxCoeff(); }

Vector uniform_mass(std::size_t n) {
    return Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

UmSpace equidistant_space(double d, Vector mu) {
    const auto n = mu.size();
    Matrix u = Matrix::Constant(n, n, d);
    u.diagonal().setZero();
    return UmSpace(std::move(u), std::move(mu));
}

UmSpace equidistant_space(std::size_t n, double d) { return equidistant_space(d, uniform_mass(n)); }

UmSpace one_point_space() { return UmSpace(Matrix::Zero(1, 1), Vector::Ones(1)); }

ValidationReport validate(const UmSpace& space, SpaceKind mode, std::size_t max_recorded) {
    const std::size_t n = space.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = space.mu(i);
        if (!std::isfinite(m) || m <= 0.0)
            throw ValidationError("mass of point '" + space.ids()[i] + "' is not positive");
        total += m;
    }
    if (std::abs(total - 1.0) > kMassTol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "masses sum to " << total << ", expected 1";
        throw ValidationError(msg.str());
    }
    if (!space.u().allFinite()) throw ValidationError("dissimilarity matrix has non-finite entries");

    ValidationReport report;
    auto record = [&](std::string kind, std::vector<std::size_t> idx, std::string detail) {
        report.ok = false;
        ++report.total;
        if (report.violations.size() < max_recorded)
            report.violations.push_back({std::move(kind), std::move(idx), std::move(detail)});
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (space.u(i, i) < 0.0) record("negative", {i, i}, "negative self-dissimilarity");
        if (mode == SpaceKind::ultrametric && std::abs(space.u(i, i)) > kMetricTol)
            record("nonzero_diagonal", {i}, "ultrametric requires u(x,x) = 0");
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(space.u(i, j) - space.u(j, i)) > kMetricTol)
                record("asymmetric", {i, j}, "u(i,j) != u(j,i)");
            if (space.u(i, j) < 0.0) record("negative", {i, j}, "negative dissimilarity");
            const double floor = std::max(space.u(i, i), space.u(j, j));
            if (space.u(i, j) <= floor + kMetricTol)
                record("diagonal", {i, j},
                       "need max(u(i,i), u(j,j)) < u(i,j) for distinct points");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (space.u(i, j) > std::max(space.u(i, k), space.u(k, j)) + kMetricTol)
                    record("strong_triangle", {i, j, k}, "u(i,j) > max(u(i,k), u(k,j))");
            }
    return report;
}

void require_valid(const UmSpace& space, SpaceKind mode, const std::string& context) {
    const auto report = validate(space, mode);
    if (report.ok) return;
    std::ostringstream msg;
    if (!context.empty()) msg << context << ": ";
    msg << "not a valid " << to_string(mode) << " space (" << report.total << " violations";
    const auto& v = report.violations.front();
    msg << "; first: " << v.kind << " at (";
    for (std::size_t k = 0; k < v.indices.size(); ++k) msg << (k ? "," : "") << v.indices[k];
    msg << "): " << v.detail << ")";
    throw ValidationError(msg.str());
}

QuotientSpace quotient(const UmSpace& space, double t) {
    const std::size_t n = space.size();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    auto blocks = components(all, [&](std::size_t a, std::size_t b) {
        return space.u(a, b) <= t + kMetricTol;
    });

    const auto k = static_cast<Eigen::Index>(blocks.size());
    std::vector<std::size_t> block_of(n);
    Matrix u = Matrix::Zero(k, k);
    Vector mu = Vector::Zero(k);
    std::vector<std::string> ids;
    ids.reserve(blocks.size());
    for (Eigen::Index b = 0; b < k; ++b) {
        std::string label;
        for (std::size_t idx : blocks[b]) {
            block_of[idx] = static_cast<std::size_t>(b);
            mu(b) += space.mu(idx);
            label += (label.empty() ? "" : "+") + space.ids()[idx];
        }
        ids.push_back(std::move(label));
        for (Eigen::Index c = 0; c < b; ++c) {
            const double d = space.u(blocks[b].front(), blocks[c].front());
            u(b, c) = d;
            u(c, b) = d;
        }
    }
    return QuotientSpace{t, std::move(blocks), std::move(block_of),
                         UmSpace(std::move(ids), std::move(u), std::move(mu))};
}

std::vector<double> spectrum(const UmSpace& space) {
    const Matrix& u = space.u();
    std::vector<double> values(u.data(), u.data() + u.size());
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    for (double v : values)
        if (out.empty() || v - out.back() > kMetricTol) out.push_back(v);
    return out;
}

UmSpace snowflake(const UmSpace& space, double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("snowflake exponent must be a finite p >= 1");
    Matrix u = space.u().unaryExpr([p](double v) { return std::pow(v, p); });
    return UmSpace(space.ids(), std::move(u), space.mu());
}

double diam_p(const UmSpace& space, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("diam_p requires p >= 1");
    if (is_inf(p)) return space.diameter();
    const std::size_t n = space.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t k = 0; k < n; ++k) row += std::pow(space.u(i, k), p) * space.mu(k);
        total += space.mu(i) * row;
    }
    return std::pow(total, 1.0 / p);
}

Dendrogram::Dendrogram(std::vector<std::string> ids, std::vector<DendrogramNode> nodes)
    : ids_(std::move(ids)), nodes_(std::move(nodes)), leaf_of_(ids_.size(), nodes_.size()) {
    if (nodes_.empty()) throw ValidationError("dendrogram has no nodes");
    if (nodes_.front().parent) throw ValidationError("node 0 must be the root");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        if (node.point) {
            if (*node.point >= ids_.size() || leaf_of_[*node.point] != nodes_.size())
                throw ValidationError("dendrogram leaf points are not a bijection");
            if (!node.children.empty()) throw ValidationError("dendrogram leaf has children");
            leaf_of_[*node.point] = i;
        } else if (node.children.size() < 2) {
            throw ValidationError("internal dendrogram node with fewer than two children");
        }
        for (std::size_t c : node.children) {
            if (c >= nodes_.size() || nodes_[c].parent != i)
                throw ValidationError("inconsistent dendrogram parent links");
            if (!(nodes_[c].height < node.height))
                throw ValidationError("dendrogram heights must decrease from root to leaves");
        }
    }
    for (std::size_t p = 0; p < ids_.size(); ++p)
        if (leaf_of_[p] == nodes_.size()) throw ValidationError("point without dendrogram leaf");
}

std::vector<std::size_t> Dendrogram::points_below(std::size_t n) const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{n};
    while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        const auto& node = nodes_[cur];
        if (node.point) out.push_back(*node.point);
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
            stack.push_back(*it);
    }
    return out;
}

Dendrogram to_dendrogram(const UmSpace& space) {
    require_valid(space, SpaceKind::ultra_dissimilarity, "to_dendrogram");

    // First pass: unordered tree.
    std::vector<DendrogramNode> raw;
    std::function<std::size_t(const std::vector<std::size_t>&, std::optional<std::size_t>)> build =
        [&](const std::vector<std::size_t>& members, std::optional<std::size_t> parent) {
            const std::size_t index = raw.size();
            raw.emplace_back();
            raw[index].parent = parent;
            if (members.size() == 1) {
                raw[index].point = members.front();
                raw[index].height = space.u(members.front(), members.front());
                raw[index].mass = space.mu(members.front());
                return index;
            }
            double h = 0.0;
            double mass = 0.0;
            for (std::size_t a : members) {
                mass += space.mu(a);
                for (std::size_t b : members)
                    if (a != b) h = std::max(h, space.u(a, b));
            }
            raw[index].height = h;
            raw[index].mass = mass;
            auto groups = components(members, [&](std::size_t a, std::size_t b) {
                return space.u(a, b) < h - kMetricTol;
            });
            if (groups.size() < 2)
                throw ValidationError("to_dendrogram: strong triangle inequality violated beyond tolerance");
            for (const auto& g : groups) {
                const std::size_t child = build(g, index);
                raw[index].children.push_back(child);
            }
            return index;
        };
    std::vector<std::size_t> all(space.size());
    std::iota(all.begin(), all.end(), 0);
    build(all, std::nullopt);

    // Second pass: order children by signature and renumber in preorder.
    const Dendrogram unordered(space.ids(), raw);
    const auto sig = node_signatures(unordered, {.with_mass = true, .with_ids = true});
    std::vector<DendrogramNode> nodes;
    nodes.reserve(raw.size());
    std::function<std::size_t(std::size_t, std::optional<std::size_t>)> emit =
        [&](std::size_t old, std::optional<std::size_t> parent) {
            const std::size_t index = nodes.size();
            nodes.push_back(raw[old]);
            nodes[index].parent = parent;
            nodes[index].children.clear();
            auto kids = raw[old].children;
            std::sort(kids.begin(), kids.end(),
                      [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
            for (std::size_t k : kids) {
                const std::size_t child = emit(k, index);
                nodes[index].children.push_back(child);
            }
            return index;
        };
    emit(0, std::nullopt);
    return Dendrogram(space.ids(), std::move(nodes));
}

UmSpace from_dendrogram(const Dendrogram& dendrogram) {
    const std::size_t n = dendrogram.point_count();
    Matrix u = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Vector mu(static_cast<Eigen::Index>(n));
    const auto& nodes = dendrogram.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& node = nodes[i];
        if (node.point) {
            const auto p = static_cast<Eigen::Index>(*node.point);
            u(p, p) = node.height;
            mu(p) = node.mass;
            continue;
        }
        std::vector<std::vector<std::size_t>> below;
        for (std::size_t c : node.children) below.push_back(dendrogram.points_below(c));
        for (std::size_t a = 0; a < below.size(); ++a)
            for (std::size_t b = a + 1; b < below.size(); ++b)
                for (std::size_t x : below[a])
                    for (std::size_t y : below[b]) {
                        u(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = node.height;
                        u(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = node.height;
                    }
    }
    return UmSpace(dendrogram.ids(), std::move(u), std::move(mu));
}

}  // namespace ugw
