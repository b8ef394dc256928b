#include "ugw/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace ugw {

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing JSON field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad JSON field \"") + key + "\": " + e.what());
    }
}

std::string sig17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(std::move(cell));
    return out;
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(std::string("JSON: ") + e.what(), line, column);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("matrix must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError("matrix rows must be arrays of equal length");
        for (Eigen::Index k = 0; k < cols; ++k) {
            const Json& v = row[static_cast<std::size_t>(k)];
            if (!v.is_number()) throw ParseError("matrix entries must be numbers");
            m(i, k) = v.get<double>();
        }
    }
    return m;
}

Json space_to_json(const UmSpace& space, SpaceKind kind) {
    Json j;
    j["ids"] = space.ids();
    j["u"] = matrix_to_json(space.u());
    j["mu"] = std::vector<double>(space.mu().data(), space.mu().data() + space.mu().size());
    j["kind"] = to_string(kind);
    return j;
}

UmSpace space_from_json(const Json& j) {
    const Matrix u = matrix_from_json(j.contains("u") ? j.at("u") : throw ParseError("missing JSON field \"u\""));
    const auto mu = field<std::vector<double>>(j, "mu");
    Vector m = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    try {
        if (j.contains("ids")) return UmSpace(field<std::vector<std::string>>(j, "ids"), u, std::move(m));
        return UmSpace(u, std::move(m));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

UmSpace load_space(const std::string& path) { return space_from_json(parse_json(read_file(path))); }

Json dendrogram_to_json(const Dendrogram& dendrogram) {
    std::function<Json(std::size_t)> emit = [&](std::size_t v) {
        const auto& node = dendrogram.node(v);
        Json j;
        if (node.is_leaf()) {
            j["id"] = dendrogram.ids()[*node.point];
            j["mass"] = node.mass;
            j["h"] = node.height;
            return j;
        }
        j["h"] = node.height;
        j["mass"] = node.mass;
        Json kids = Json::array();
        for (std::size_t c : node.children) kids.push_back(emit(c));
        j["children"] = std::move(kids);
        return j;
    };
    return emit(0);
}

ScalarMeasure measure_from_json(const Json& j) {
    return ScalarMeasure(field<std::vector<double>>(j, "x"), field<std::vector<double>>(j, "m"));
}

Json result_to_json(const GwResult& result) {
    Json j;
    j["value"] = result.value;
    j["method"] = result.method;
    if (result.level) j["level"] = *result.level;
    if (!result.matching.empty()) {
        Json pairs = Json::array();
        for (const auto& [a, b] : result.matching) pairs.push_back(Json::array({a, b}));
        j["matching"] = std::move(pairs);
    }
    if (result.coupling) j["coupling"] = matrix_to_json(*result.coupling);
    if (!result.trace.empty()) j["trace"] = result.trace;
    return j;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string write_matrix_csv(const LabelledMatrix& m, const std::string& comment) {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    out += "id";
    for (const auto& id : m.ids) out += "," + csv_cell(id);
    out += "\n";
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        out += csv_cell(m.ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) out += "," + sig17(m.values(i, j));
        out += "\n";
    }
    return out;
}

LabelledMatrix read_matrix_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_no;
    std::size_t line = 0, start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line;
        const std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        if (raw.empty() || raw == "\r" || raw.front() == '#') continue;
        rows.push_back(split_csv_line(raw));
        line_no.push_back(line);
    }
    if (rows.empty()) throw ParseError("CSV matrix is empty");
    LabelledMatrix m;
    m.ids.assign(rows.front().begin() + 1, rows.front().end());
    const std::size_t n = m.ids.size();
    if (rows.size() != n + 1) throw ParseError("CSV matrix must have one row per header id");
    m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[i + 1];
        if (row.size() != n + 1) throw ParseError("CSV row has the wrong number of cells", line_no[i + 1], 1);
        if (row.front() != m.ids[i]) throw ParseError("CSV row id does not match the header", line_no[i + 1], 1);
        for (std::size_t j = 0; j < n; ++j) {
            const std::string& cell = row[j + 1];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
                throw ParseError("CSV cell is not a number: '" + cell + "'", line_no[i + 1], j + 2);
            m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return m;
}

std::string write_table_csv(const std::vector<std::string>& header, const std::vector<std::string>& row_ids,
                            const Matrix& values, const std::string& comment) {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + csv_cell(header[k]);
    out += "\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out += csv_cell(row_ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < values.cols(); ++j) out += "," + sig17(values(i, j));
        out += "\n";
    }
    return out;
}

}  // namespace ugw
