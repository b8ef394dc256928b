#pragma once

#include "ugw/gw.hpp"
#include "ugw/spaces.hpp"
#include "ugw/transport.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace ugw {

using Json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become ParseError with line and column.
Json parse_json(std::string_view text);

std::string read_file(const std::string& path);
/// Writes `text` to `path`, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& text);

/// {"ids": [...], "u": [[...]], "mu": [...], "kind": "ultrametric"}.
/// "ids" is optional on input; "kind" is informational.
Json space_to_json(const UmSpace& space, SpaceKind kind = SpaceKind::ultrametric);
UmSpace space_from_json(const Json& j);
UmSpace load_space(const std::string& path);

/// Nested {"h", "mass", "children"}; leaves are {"id", "mass", "h"}.
Json dendrogram_to_json(const Dendrogram& dendrogram);

/// {"x": [...], "m": [...]}
ScalarMeasure measure_from_json(const Json& j);

/// {"value", "method", then "level", "matching", "coupling", "trace" when set}.
Json result_to_json(const GwResult& result);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

struct LabelledMatrix {
    std::vector<std::string> ids;
    Matrix values;
};

/// CSV with an "id" header row and an id first column; values with 17
/// significant digits. A non-empty `comment` is written first as "# comment".
std::string write_matrix_csv(const LabelledMatrix& m, const std::string& comment = {});
/// Reads the format above; lines starting with '#' are skipped.
LabelledMatrix read_matrix_csv(std::string_view text);

/// Plain table with a header row, used for MDS coordinates.
std::string write_table_csv(const std::vector<std::string>& header,
                            const std::vector<std::string>& row_ids, const Matrix& values,
                            const std::string& comment = {});

}  // namespace ugw
