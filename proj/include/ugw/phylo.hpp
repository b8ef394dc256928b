#pragma once

#include "ugw/spaces.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ugw {

struct PhyloNode {
    std::optional<std::string> label;
    std::optional<double> length;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;

    bool is_tip() const { return children.empty(); }
};

/// Rooted phylogenetic tree; node 0 is the root.
class PhyloTree {
public:
    explicit PhyloTree(std::vector<PhyloNode> nodes);

    const std::vector<PhyloNode>& nodes() const { return nodes_; }
    const PhyloNode& node(std::size_t i) const { return nodes_[i]; }
    /// Tip node indices in left-to-right order.
    std::vector<std::size_t> tips() const;

private:
    std::vector<PhyloNode> nodes_;
};

/// Parses one Newick tree terminated by ';'. Supports quoted labels ('' is
/// an escaped quote), internal labels, branch lengths and [comments].
/// Throws ParseError with line and column.
PhyloTree parse_newick(std::string_view text);

/// Parses every ';'-terminated tree in the text.
std::vector<PhyloTree> parse_newick_all(std::string_view text);

std::string write_newick(const PhyloTree& tree);

/// Ordered structural equality: same shape, labels and lengths.
bool same_tree(const PhyloTree& a, const PhyloTree& b);

enum class TipMeasure { uniform, length_weighted };

/// Ultra-dissimilarity space on the tips: u(x, y) = d - depth(lca(x, y)) for
/// x != y and u(x, x) = d - depth(x), with d the largest tip depth. Depths
/// count edges when `unit_edges` is set, otherwise they sum branch lengths
/// (the root's own length is ignored). `length_weighted` puts mass on tips
/// in proportion to their pendant edge length.
UmSpace tree_shape_space(const PhyloTree& tree, bool unit_edges,
                         TipMeasure measure = TipMeasure::uniform);

/// Treegram of an ultra-dissimilarity space: leaves are born at u(x, x).
Dendrogram treegram(const UmSpace& space);

}  // namespace ugw
