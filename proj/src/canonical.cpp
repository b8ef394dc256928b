#include "ugw/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ugw {

std::int64_t quantize(double value) { return std::llround(value / kQuantum); }

std::vector<std::string> node_signatures(const Dendrogram& dendrogram,
                                         const CanonicalOptions& options) {
    const auto& nodes = dendrogram.nodes();
    std::vector<std::string> sig(nodes.size());
    // Children always follow their parent in storage order only for
    // dendrograms we emit ourselves, so recurse instead of sweeping.
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        const auto& node = nodes[i];
        std::string s;
        s += node.is_leaf() ? '(' : '[';
        s += std::to_string(quantize(node.height));
        if (options.with_mass) {
            s += ',';
            s += std::to_string(quantize(node.mass));
        }
        if (node.is_leaf()) {
            if (options.with_ids) {
                const auto& id = dendrogram.ids()[*node.point];
                s += ",#" + std::to_string(id.size()) + ':' + id;
            }
            s += ')';
            sig[i] = std::move(s);
            return;
        }
        std::vector<const std::string*> kids;
        for (std::size_t c : node.children) {
            visit(c);
            kids.push_back(&sig[c]);
        }
        std::sort(kids.begin(), kids.end(),
                  [](const std::string* a, const std::string* b) { return *a < *b; });
        s += ';';
        for (std::size_t k = 0; k < kids.size(); ++k) {
            if (k) s += ',';
            s += *kids[k];
        }
        s += ']';
        sig[i] = std::move(s);
    };
    visit(0);
    return sig;
}

CanonicalForm canonical_form(const Dendrogram& dendrogram, const CanonicalOptions& options) {
    return CanonicalForm(node_signatures(dendrogram, options).front());
}

std::vector<std::size_t> canonical_leaf_order(const Dendrogram& dendrogram,
                                              const CanonicalOptions& options) {
    const auto sig = node_signatures(dendrogram, options);
    std::vector<std::size_t> order;
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        const auto& node = dendrogram.node(i);
        if (node.point) {
            order.push_back(*node.point);
            return;
        }
        auto kids = node.children;
        std::stable_sort(kids.begin(), kids.end(),
                         [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
        for (std::size_t c : kids) visit(c);
    };
    visit(0);
    return order;
}

bool isomorphic(const UmSpace& a, const UmSpace& b, bool with_mass) {
    if (a.size() != b.size()) return false;
    const CanonicalOptions options{.with_mass = with_mass, .with_ids = false};
    return canonical_form(to_dendrogram(a), options) == canonical_form(to_dendrogram(b), options);
}

}  // namespace ugw
