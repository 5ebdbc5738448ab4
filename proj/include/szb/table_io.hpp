#pragma once

// Flat result tables with a fixed column schema, CSV/JSON writers and
// parsers that round-trip every value exactly, and the two-column sampled
// function loader.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "szb/errors.hpp"
#include "szb/test_function.hpp"

namespace szb {

enum class ColumnType { integer, real, text, boolean };

struct Column {
    std::string name;
    ColumnType type = ColumnType::real;
};

using Value = std::variant<std::int64_t, double, std::string, bool>;

struct ResultTable {
    std::vector<Column> columns;
    std::vector<std::vector<Value>> rows;

    [[nodiscard]] std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == name) return i;
        throw Error("no column named '" + name + "'");
    }

    void add(std::vector<Value> row) {
        if (row.size() != columns.size()) throw Error("row width does not match the table schema");
        for (std::size_t i = 0; i < row.size(); ++i)
            if (row[i].index() != static_cast<std::size_t>(columns[i].type))
                throw Error("value type does not match column '" + columns[i].name + "'");
        rows.push_back(std::move(row));
    }
};

// Bitwise equality for reals (NaN == NaN), plain equality otherwise.
[[nodiscard]] inline bool same_value(const Value& a, const Value& b) {
    if (a.index() != b.index()) return false;
    if (const auto* x = std::get_if<double>(&a)) {
        const double y = std::get<double>(b);
        if (std::isnan(*x) && std::isnan(y)) return true;
        return *x == y && std::signbit(*x) == std::signbit(y);
    }
    return a == b;
}

[[nodiscard]] inline bool same_table(const ResultTable& a, const ResultTable& b) {
    if (a.columns.size() != b.columns.size() || a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.columns.size(); ++i)
        if (a.columns[i].name != b.columns[i].name || a.columns[i].type != b.columns[i].type) return false;
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        for (std::size_t c = 0; c < a.columns.size(); ++c)
            if (!same_value(a.rows[r][c], b.rows[r][c])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// scalar formatting

[[nodiscard]] inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[nodiscard]] inline double parse_real(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    // ERANGE on underflow still yields the right subnormal
    if (s.empty() || end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v)))
        throw MalformedTable("not a real number: '" + s + "'");
    return v;
}

[[nodiscard]] inline std::int64_t parse_integer(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw MalformedTable("not an integer: '" + s + "'");
    return v;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string cell_text(const Value& v) {
    switch (v.index()) {
    case 0: return std::to_string(std::get<std::int64_t>(v));
    case 1: return format_real(std::get<double>(v));
    case 2: return csv_quote(std::get<std::string>(v));
    default: return std::get<bool>(v) ? "true" : "false";
    }
}

inline Value parse_cell(const std::string& s, ColumnType t) {
    switch (t) {
    case ColumnType::integer: return parse_integer(s);
    case ColumnType::real: return parse_real(s);
    case ColumnType::text: return s;
    case ColumnType::boolean:
        if (s == "true") return true;
        if (s == "false") return false;
        throw MalformedTable("not a boolean: '" + s + "'");
    }
    return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw MalformedTable("unterminated quote in CSV line");
    out.push_back(std::move(cur));
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// CSV / JSON

[[nodiscard]] inline std::string to_csv(const ResultTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i].name;
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += detail::cell_text(row[i]);
        }
        out += '\n';
    }
    return out;
}

[[nodiscard]] inline ResultTable parse_csv(const std::string& text, const std::vector<Column>& schema) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw MalformedTable("empty CSV document");
    const auto header = detail::split_csv_line(line);
    if (header.size() != schema.size()) throw MalformedTable("CSV header width does not match the schema");
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (header[i] != schema[i].name) throw MalformedTable("unexpected CSV column '" + header[i] + "'");
    ResultTable t{schema, {}};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != schema.size()) throw MalformedTable("CSV row width does not match the header");
        std::vector<Value> row;
        row.reserve(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) row.push_back(detail::parse_cell(cells[i], schema[i].type));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Non-finite reals are written as the strings "nan", "inf", "-inf".
[[nodiscard]] inline std::string to_json(const ResultTable& t) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& name = t.columns[i].name;
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        if (std::isfinite(v))
                            obj[name] = v;
                        else
                            obj[name] = format_real(v);
                    } else {
                        obj[name] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

[[nodiscard]] inline ResultTable parse_json(const std::string& text, const std::vector<Column>& schema) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedTable(std::string("invalid JSON table: ") + e.what());
    }
    if (!doc.is_array()) throw MalformedTable("JSON table must be an array of objects");
    ResultTable t{schema, {}};
    for (const auto& obj : doc) {
        if (!obj.is_object() || obj.size() != schema.size()) throw MalformedTable("JSON row does not match the schema");
        std::vector<Value> row;
        for (const auto& c : schema) {
            if (!obj.contains(c.name)) throw MalformedTable("JSON row lacks '" + c.name + "'");
            const auto& v = obj.at(c.name);
            switch (c.type) {
            case ColumnType::integer: row.emplace_back(v.get<std::int64_t>()); break;
            case ColumnType::real: row.emplace_back(v.is_string() ? parse_real(v.get<std::string>()) : v.get<double>()); break;
            case ColumnType::text: row.emplace_back(v.get<std::string>()); break;
            case ColumnType::boolean: row.emplace_back(v.get<bool>()); break;
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// sampled functions

// Two numeric columns (x, g(x)) separated by whitespace or a comma; x must
// start at 0 and increase strictly. Lines starting with '#' are comments,
// except "# growth_degree: d". Linear interpolation inside, constant beyond
// the last sample.
[[nodiscard]] inline TestFunction sampled_function_from_text(const std::string& text, const std::string& label) {
    std::vector<double> xs, gs;
    int growth = 0;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            const auto key = line.find("growth_degree:");
            if (key != std::string::npos) {
                std::istringstream v(line.substr(key + 14));
                if (!(v >> growth) || growth < 0)
                    throw MalformedTable("bad growth_degree header on line " + std::to_string(lineno));
            }
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a >> b) || (fields >> extra))
            throw MalformedTable("line " + std::to_string(lineno) + " is not two numeric columns");
        double x = 0, g = 0;
        try {
            x = parse_real(a);
            g = parse_real(b);
        } catch (const MalformedTable&) {
            throw MalformedTable("line " + std::to_string(lineno) + " is not two numeric columns");
        }
        if (!std::isfinite(x) || !std::isfinite(g))
            throw MalformedTable("non-finite value on line " + std::to_string(lineno));
        if (!xs.empty() && !(x > xs.back()))
            throw NonMonotoneAbscissae("abscissae must increase strictly (line " + std::to_string(lineno) + ")");
        xs.push_back(x);
        gs.push_back(g);
    }
    if (xs.size() < 2) throw MalformedTable("a sampled function needs at least two rows");
    if (xs.front() != 0.0) throw MalformedTable("the first abscissa must be 0");

    TestFunction out;
    out.label = label;
    out.growth_degree = growth;
    out.eval = [xs = std::move(xs), gs = std::move(gs)](double s) {
        if (s <= xs.front()) return gs.front();
        if (s >= xs.back()) return gs.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), s);
        const auto j = static_cast<std::size_t>(it - xs.begin());
        const double t = (s - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return gs[j - 1] + t * (gs[j] - gs[j - 1]);
    };
    return out;
}

[[nodiscard]] inline TestFunction load_sampled_function(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedTable("cannot read table file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return sampled_function_from_text(ss.str(), "table:" + path.filename().string());
}

} // namespace szb
