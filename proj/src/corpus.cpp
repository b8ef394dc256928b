#include "ugw/corpus.hpp"

#include "ugw/bounds.hpp"
#include "ugw/parallel.hpp"
#include "ugw/rng.hpp"

#include <array>

namespace ugw {

namespace {

constexpr std::array<std::pair<Method, const char*>, 9> kMethodNames{{
    {Method::ugw_inf, "ugw-inf"},
    {Method::ugh, "ugh"},
    {Method::ugw_fw, "ugw-fw"},
    {Method::uslb, "uslb"},
    {Method::utlb, "utlb"},
    {Method::uflb, "uflb"},
    {Method::slb, "slb"},
    {Method::tlb, "tlb"},
    {Method::flb, "flb"},
}};

}  // namespace

std::string to_string(Method method) {
    for (const auto& [m, name] : kMethodNames)
        if (m == method) return name;
    return "unknown";
}

Method parse_method(const std::string& text) {
    for (const auto& [m, name] : kMethodNames)
        if (text == name) return m;
    throw std::invalid_argument("unknown method '" + text + "'");
}

SpaceKind required_kind(Method method) {
    return method == Method::ugw_inf || method == Method::ugh ? SpaceKind::ultrametric
                                                             : SpaceKind::ultra_dissimilarity;
}

double pair_value(const UmSpace& x, const UmSpace& y, Method method, double p, const FwConfig& fw,
                  unsigned threads) {
    switch (method) {
        case Method::ugw_inf: return ugw_inf_exact(x, y).value;
        case Method::ugh: return ugh_exact(x, y).value;
        case Method::ugw_fw: return ugw_fw(x, y, p, fw).value;
        case Method::uslb: return uslb(x, y, p);
        case Method::utlb: return utlb(x, y, p, threads);
        case Method::uflb: return uflb(x, y, p);
        case Method::slb: return slb(x, y, p);
        case Method::tlb: return tlb(x, y, p, threads);
        case Method::flb: return flb(x, y, p);
    }
    throw std::logic_error("unhandled method");
}

CorpusMatrix corpus_matrix(const std::vector<CorpusEntry>& corpus, const MatrixConfig& config) {
    CorpusMatrix out;
    std::vector<const CorpusEntry*> kept;
    for (const auto& entry : corpus) {
        try {
            require_valid(entry.space, required_kind(config.method), entry.source);
            kept.push_back(&entry);
        } catch (const ValidationError& e) {
            if (!config.skip_invalid) throw ValidationError(entry.source + ": " + e.what());
            out.skipped.push_back(entry.source + ": " + e.what());
        }
    }
    if (kept.size() < 2) throw ValidationError("matrix needs at least two valid spaces");

    const std::size_t n = kept.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    Matrix values = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(pairs.size(), config.threads, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        FwConfig fw = config.fw;
        fw.seed = SplitMix64::stream(config.fw.seed, k)();
        fw.threads = 1;
        const double v = pair_value(kept[i]->space, kept[j]->space, config.method, config.p, fw);
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    });

    for (const auto* entry : kept) out.matrix.ids.push_back(entry->id);
    out.matrix.values = std::move(values);
    return out;
}

}  // namespace ugw
