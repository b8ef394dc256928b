#pragma once

#include "ugw/gw.hpp"
#include "ugw/io.hpp"
#include "ugw/spaces.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ugw {

enum class Method { ugw_inf, ugh, ugw_fw, uslb, utlb, uflb, slb, tlb, flb };

std::string to_string(Method method);
Method parse_method(const std::string& text);
/// The validation mode a method demands of its inputs.
SpaceKind required_kind(Method method);

struct CorpusEntry {
    /// Reported in errors; usually the file name.
    std::string source;
    std::string id;
    UmSpace space;
};

struct MatrixConfig {
    Method method = Method::uslb;
    double p = 1.0;
    /// Frank-Wolfe settings; the seed of pair (i, j) is derived from
    /// fw.seed and the pair index, and restarts run serially per pair.
    FwConfig fw;
    /// Workers over pairs; 0 = machine parallelism.
    unsigned threads = 0;
    bool skip_invalid = false;
};

/// Value of one method on one pair. `threads` is passed to methods with an
/// internal parallel loop.
double pair_value(const UmSpace& x, const UmSpace& y, Method method, double p, const FwConfig& fw = {},
                  unsigned threads = 1);

struct CorpusMatrix {
    LabelledMatrix matrix;
    /// "source: reason" for every entry dropped by skip_invalid.
    std::vector<std::string> skipped;
};

/// Symmetric matrix of a method over a corpus. Every unordered pair is
/// computed once; the diagonal is 0. Invalid spaces abort with a
/// ValidationError naming their source unless skip_invalid is set.
CorpusMatrix corpus_matrix(const std::vector<CorpusEntry>& corpus, const MatrixConfig& config);

}  // namespace ugw
