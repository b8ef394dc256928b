#include "ugw/phylo.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>

namespace ugw {

namespace {

constexpr std::string_view kDelimiters = "()[]':;,";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

class NewickReader {
public:
    explicit NewickReader(std::string_view text) : text_(text) {}

    bool at_end() {
        skip();
        return pos_ >= text_.size();
    }

    PhyloTree read_tree() {
        std::vector<PhyloNode> nodes(1);
        std::vector<std::size_t> open;
        std::size_t cur = 0;
        auto new_child = [&](std::size_t parent) {
            const std::size_t id = nodes.size();
            nodes.emplace_back();
            nodes[id].parent = parent;
            nodes[parent].children.push_back(id);
            return id;
        };

        skip();
        if (pos_ >= text_.size()) fail("empty Newick input");
        for (;;) {
            skip();
            if (peek() == '(') {
                ++pos_;
                open.push_back(cur);
                cur = new_child(cur);
                continue;
            }
            // Leaf, or an internal node whose ')' was just consumed.
            for (;;) {
                read_label_and_length(nodes[cur]);
                skip();
                const char c = peek();
                if (c == ',') {
                    if (open.empty()) fail("',' outside parentheses");
                    ++pos_;
                    cur = new_child(open.back());
                    break;
                }
                if (c == ')') {
                    if (open.empty()) fail("unbalanced ')'");
                    ++pos_;
                    cur = open.back();
                    open.pop_back();
                    continue;
                }
                if (c == ';') {
                    if (!open.empty()) fail("unbalanced '(': missing ')'");
                    ++pos_;
                    return PhyloTree(std::move(nodes));
                }
                if (c == '\0') fail(open.empty() ? "missing ';'" : "unbalanced '(': missing ')'");
                fail(std::string("unexpected character '") + c + "'");
            }
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError("Newick: " + what, line, column);
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip() {
        for (;;) {
            while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
            if (peek() != '[') return;
            const std::size_t start = pos_;
            const auto close = text_.find(']', pos_);
            if (close == std::string_view::npos) {
                pos_ = start;
                fail("unterminated comment");
            }
            pos_ = close + 1;
        }
    }

    void read_label_and_length(PhyloNode& node) {
        skip();
        if (peek() == '\'') {
            ++pos_;
            std::string label;
            for (;;) {
                if (pos_ >= text_.size()) fail("unterminated quoted label");
                const char c = text_[pos_++];
                if (c == '\'') {
                    if (peek() == '\'') {
                        label += '\'';
                        ++pos_;
                        continue;
                    }
                    break;
                }
                label += c;
            }
            node.label = std::move(label);
        } else {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && !is_space(text_[pos_]) &&
                   kDelimiters.find(text_[pos_]) == std::string_view::npos)
                ++pos_;
            if (pos_ > start) node.label = std::string(text_.substr(start, pos_ - start));
        }
        skip();
        if (peek() != ':') return;
        ++pos_;
        skip();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_]) &&
               kDelimiters.find(text_[pos_]) == std::string_view::npos)
            ++pos_;
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        // from_chars rejects a leading '+'.
        if (first != last && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (start == pos_ || ec != std::errc() || ptr != last || !std::isfinite(value)) {
            pos_ = start;
            fail("malformed branch length");
        }
        node.length = value;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

bool needs_quotes(const std::string& label) {
    if (label.empty()) return true;
    return std::any_of(label.begin(), label.end(), [](char c) {
        return is_space(c) || kDelimiters.find(c) != std::string_view::npos;
    });
}

void write_label(std::string& out, const std::string& label) {
    if (!needs_quotes(label)) {
        out += label;
        return;
    }
    out += '\'';
    for (char c : label) {
        if (c == '\'') out += '\'';
        out += c;
    }
    out += '\'';
}

void write_number(std::string& out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

// Euler tour with a sparse table of (depth, node) minima for O(1) LCA.
class LcaIndex {
public:
    explicit LcaIndex(const PhyloTree& tree) : first_(tree.nodes().size()), level_(tree.nodes().size()) {
        std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next == 0) first_[v] = euler_.size();
            euler_.push_back(v);
            const auto& kids = tree.node(v).children;
            if (next < kids.size()) {
                const std::size_t child = kids[next++];
                level_[child] = level_[v] + 1;
                stack.emplace_back(child, 0);
            } else {
                stack.pop_back();
            }
        }
        const std::size_t n = euler_.size();
        table_.push_back(euler_);
        for (std::size_t k = 1; (std::size_t{1} << k) <= n; ++k) {
            const auto& prev = table_.back();
            std::vector<std::size_t> row(n - (std::size_t{1} << k) + 1);
            for (std::size_t i = 0; i < row.size(); ++i)
                row[i] = shallower(prev[i], prev[i + (std::size_t{1} << (k - 1))]);
            table_.push_back(std::move(row));
        }
    }

    std::size_t lca(std::size_t a, std::size_t b) const {
        std::size_t l = first_[a], r = first_[b];
        if (l > r) std::swap(l, r);
        const std::size_t k = static_cast<std::size_t>(std::bit_width(r - l + 1)) - 1;
        return shallower(table_[k][l], table_[k][r + 1 - (std::size_t{1} << k)]);
    }

private:
    std::size_t shallower(std::size_t a, std::size_t b) const { return level_[a] <= level_[b] ? a : b; }

    std::vector<std::size_t> euler_, first_, level_;
    std::vector<std::vector<std::size_t>> table_;
};

}  // namespace

PhyloTree::PhyloTree(std::vector<PhyloNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw ValidationError("phylogenetic tree has no nodes");
    if (nodes_.front().parent) throw ValidationError("node 0 must be the root");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!nodes_[i].parent || *nodes_[i].parent >= nodes_.size())
            throw ValidationError("phylogenetic tree must have a single root");
}

std::vector<std::size_t> PhyloTree::tips() const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        if (nodes_[v].is_tip()) out.push_back(v);
        for (auto it = nodes_[v].children.rbegin(); it != nodes_[v].children.rend(); ++it)
            stack.push_back(*it);
    }
    return out;
}

PhyloTree parse_newick(std::string_view text) {
    NewickReader reader(text);
    PhyloTree tree = reader.read_tree();
    if (!reader.at_end()) reader.fail("trailing characters after ';'");
    return tree;
}

std::vector<PhyloTree> parse_newick_all(std::string_view text) {
    NewickReader reader(text);
    std::vector<PhyloTree> out;
    while (!reader.at_end()) out.push_back(reader.read_tree());
    if (out.empty()) reader.fail("no tree found");
    return out;
}

std::string write_newick(const PhyloTree& tree) {
    std::string out;
    std::function<void(std::size_t)> emit = [&](std::size_t v) {
        const auto& node = tree.node(v);
        if (!node.children.empty()) {
            out += '(';
            for (std::size_t k = 0; k < node.children.size(); ++k) {
                if (k) out += ',';
                emit(node.children[k]);
            }
            out += ')';
        }
        if (node.label) write_label(out, *node.label);
        if (node.length) {
            out += ':';
            write_number(out, *node.length);
        }
    };
    emit(0);
    out += ';';
    return out;
}

bool same_tree(const PhyloTree& a, const PhyloTree& b) {
    std::function<bool(std::size_t, std::size_t)> eq = [&](std::size_t x, std::size_t y) {
        const auto& nx = a.node(x);
        const auto& ny = b.node(y);
        if (nx.label != ny.label || nx.length != ny.length || nx.children.size() != ny.children.size())
            return false;
        for (std::size_t k = 0; k < nx.children.size(); ++k)
            if (!eq(nx.children[k], ny.children[k])) return false;
        return true;
    };
    return eq(0, 0);
}

UmSpace tree_shape_space(const PhyloTree& tree, bool unit_edges, TipMeasure measure) {
    const auto& nodes = tree.nodes();
    std::vector<double> depth(nodes.size(), 0.0);
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t c : nodes[v].children) {
            double edge = 1.0;
            if (!unit_edges) {
                if (!nodes[c].length)
                    throw ValidationError("branch length missing; use unit edges for topology-only trees");
                if (*nodes[c].length < 0.0) throw ValidationError("negative branch length");
                edge = *nodes[c].length;
            }
            depth[c] = depth[v] + edge;
            stack.push_back(c);
        }
    }

    const auto tips = tree.tips();
    const std::size_t n = tips.size();
    double d = 0.0;
    for (std::size_t t : tips) d = std::max(d, depth[t]);

    const LcaIndex lca(tree);
    const auto sz = static_cast<Eigen::Index>(n);
    Matrix u(sz, sz);
    for (std::size_t i = 0; i < n; ++i) {
        u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d - depth[tips[i]];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = d - depth[lca.lca(tips[i], tips[j])];
            u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }

    Vector mu = uniform_mass(n);
    if (measure == TipMeasure::length_weighted) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& tip = nodes[tips[i]];
            const double w = unit_edges || !tip.parent ? 1.0 : *tip.length;
            mu(static_cast<Eigen::Index>(i)) = w;
            total += w;
        }
        if (!(total > 0.0)) throw ValidationError("length-weighted measure needs positive pendant lengths");
        mu /= total;
    }

    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& label = nodes[tips[i]].label;
        ids.push_back(label ? *label : "tip" + std::to_string(i));
    }
    UmSpace space(std::move(ids), std::move(u), std::move(mu));
    require_valid(space, SpaceKind::ultra_dissimilarity, "tree shape (zero-length pendant edge?)");
    return space;
}

Dendrogram treegram(const UmSpace& space) {
    require_valid(space, SpaceKind::ultra_dissimilarity, "treegram");
    return to_dendrogram(space);
}

}  // namespace ugw
