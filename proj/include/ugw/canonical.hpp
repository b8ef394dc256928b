#pragma once

#include "ugw/spaces.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ugw {

struct CanonicalOptions {
    /// Include node masses (weighted isomorphism). Off gives the mass-blind
    /// form used for isometry of unweighted quotients.
    bool with_mass = true;
    /// Include leaf ids. Off for isomorphism tests; on for deterministic
    /// serialization order.
    bool with_ids = false;
};

/// Order-invariant signature of a height- and mass-labelled rooted tree
/// (Aho-Hopcroft-Ullman style: children signatures are sorted before being
/// concatenated). Heights and masses are rounded to kQuantum first, so two
/// dendrograms have equal forms iff they are isomorphic at that resolution.
class CanonicalForm {
public:
    CanonicalForm() = default;
    explicit CanonicalForm(std::string signature) : signature_(std::move(signature)) {}

    const std::string& signature() const { return signature_; }

    friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
    friend auto operator<=>(const CanonicalForm&, const CanonicalForm&) = default;

private:
    std::string signature_;
};

std::int64_t quantize(double value);

/// Signature of every node, indexed like dendrogram.nodes().
std::vector<std::string> node_signatures(const Dendrogram& dendrogram,
                                         const CanonicalOptions& options = {});

CanonicalForm canonical_form(const Dendrogram& dendrogram, const CanonicalOptions& options = {});

/// Leaves visited depth-first with children in signature order. For two
/// dendrograms with equal canonical forms (ids excluded), the i-th entries
/// of their canonical leaf orders correspond under an isomorphism.
std::vector<std::size_t> canonical_leaf_order(const Dendrogram& dendrogram,
                                              const CanonicalOptions& options = {});

/// Weighted isomorphism of ultra-dissimilarity measure spaces.
bool isomorphic(const UmSpace& a, const UmSpace& b, bool with_mass = true);

}  // namespace ugw
