#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fairhsic/core/error.hpp"

namespace fairhsic::data {

// Column-named string records, as read from a delimited file.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t size() const noexcept { return rows.size(); }

    std::size_t column_index(std::string_view name) const {
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw DataError("no column named '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }

    RawTable subset(const std::vector<std::size_t>& indices) const {
        RawTable out{columns, {}};
        out.rows.reserve(indices.size());
        for (std::size_t i : indices) out.rows.push_back(rows.at(i));
        return out;
    }
};

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_fields(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, std::string_view context = {}) {
    double v = 0.0;
    const auto t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw DataError("cannot parse '" + std::string(s) + "' as a number" +
                        (context.empty() ? "" : " (" + std::string(context) + ")"));
    }
    return v;
}

// Shortest-exact rendering with 17 significant digits; parse_double inverts it bit-exactly.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

inline const std::vector<std::string>& adult_columns() {
    static const std::vector<std::string> cols = {
        "age",          "workclass",    "fnlwgt",       "education",    "education-num",
        "marital-status", "occupation", "relationship", "race",         "sex",
        "capital-gain", "capital-loss", "hours-per-week", "native-country", "income"};
    return cols;
}

struct AdultLoadStats {
    std::size_t lines_read = 0;
    std::size_t dropped_missing = 0;
};

// Reads one UCI Adult file (adult.data or adult.test format). Rows containing
// a '?' field are dropped; the trailing '.' on adult.test labels is removed.
inline void append_adult(RawTable& table, const std::string& path, AdultLoadStats* stats = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open Adult file '" + path + "'");
    if (table.columns.empty()) table.columns = adult_columns();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '|') continue;
        if (stats) ++stats->lines_read;
        auto fields = split_fields(t, ',');
        if (fields.size() != 15) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 15 fields, found " +
                            std::to_string(fields.size()));
        }
        if (std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return f == "?"; })) {
            if (stats) ++stats->dropped_missing;
            continue;
        }
        std::string& label = fields.back();
        if (!label.empty() && label.back() == '.') label.pop_back();
        if (label != ">50K" && label != "<=50K") {
            throw DataError(path + ":" + std::to_string(line_no) + ": unrecognised income label '" + label + "'");
        }
        table.rows.push_back(std::move(fields));
    }
}

inline RawTable load_adult(const std::vector<std::string>& paths, AdultLoadStats* stats = nullptr) {
    RawTable table{adult_columns(), {}};
    for (const auto& p : paths) append_adult(table, p, stats);
    return table;
}

inline RawTable load_adult(const std::string& path, AdultLoadStats* stats = nullptr) {
    return load_adult(std::vector<std::string>{path}, stats);
}

} // namespace fairhsic::data
