#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/data/dataset.hpp"
#include "fairhsic/data/schema.hpp"
#include "fairhsic/data/table.hpp"

namespace fairhsic::data {

struct PreprocessOptions {
    std::string protected_column = "sex";
    std::string label_column = "income";
    std::string positive_label = ">50K";
    std::vector<std::string> continuous_columns = {"age",          "fnlwgt",       "education-num",
                                                   "capital-gain", "capital-loss", "hours-per-week"};
    // Columns ignored entirely (neither feature, label nor protected).
    std::vector<std::string> ignored_columns;
};

struct TransformStats {
    // column name -> number of rows whose category was not in the schema
    std::map<std::string, std::size_t> unknown_categories;
};

namespace detail {

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

inline std::vector<std::size_t> all_rows(const RawTable& t) {
    std::vector<std::size_t> r(t.size());
    std::iota(r.begin(), r.end(), std::size_t{0});
    return r;
}

} // namespace detail

// Learns the schema from the given rows: population mean/std for continuous
// columns, lexicographically ordered categories, protected group ordering.
inline FeatureSchema fit_schema(const RawTable& table, const PreprocessOptions& opts,
                                const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw DataError("cannot fit a schema on zero records");
    FeatureSchema schema;
    schema.protected_column = opts.protected_column;
    schema.label_column = opts.label_column;
    schema.positive_label = opts.positive_label;
    table.column_index(opts.label_column);

    std::set<std::string> groups;
    const std::size_t pc = table.column_index(opts.protected_column);
    for (std::size_t r : rows) groups.insert(table.rows[r][pc]);
    schema.protected_groups.assign(groups.begin(), groups.end());

    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const std::string& name = table.columns[c];
        if (name == opts.protected_column || name == opts.label_column ||
            detail::contains(opts.ignored_columns, name)) {
            continue;
        }
        if (detail::contains(opts.continuous_columns, name)) {
            double sum = 0.0;
            for (std::size_t r : rows) sum += parse_double(table.rows[r][c], name);
            const double mean = sum / static_cast<double>(rows.size());
            double ss = 0.0;
            for (std::size_t r : rows) {
                const double t = parse_double(table.rows[r][c], name) - mean;
                ss += t * t;
            }
            double sd = std::sqrt(ss / static_cast<double>(rows.size()));
            if (!(sd > 0.0)) sd = 1.0;
            schema.columns.emplace_back(ContinuousColumn{name, mean, sd});
        } else {
            std::set<std::string> cats;
            for (std::size_t r : rows) cats.insert(table.rows[r][c]);
            schema.columns.emplace_back(CategoricalColumn{name, {cats.begin(), cats.end()}});
        }
    }
    return schema;
}

inline FeatureSchema fit_schema(const RawTable& table, const PreprocessOptions& opts) {
    return fit_schema(table, opts, detail::all_rows(table));
}

// Applies a fitted schema. A category absent from the schema leaves its
// one-hot block all-zero and is counted in `stats`.
inline TabularDataset transform(const RawTable& table, const FeatureSchema& schema,
                                const std::vector<std::size_t>& rows, TransformStats* stats = nullptr) {
    const auto blocks = schema.blocks();
    const std::size_t d = schema.feature_dim();
    TabularDataset out{Matrix(rows.size(), d), {}, {}, schema};
    out.s.reserve(rows.size());
    out.y.reserve(rows.size());

    const std::size_t pc = table.column_index(schema.protected_column);
    const std::size_t lc = table.column_index(schema.label_column);
    std::vector<std::size_t> src(schema.columns.size());
    std::vector<std::map<std::string, std::size_t, std::less<>>> lookup(schema.columns.size());
    for (std::size_t k = 0; k < schema.columns.size(); ++k) {
        src[k] = table.column_index(column_name(schema.columns[k]));
        if (const auto* cat = std::get_if<CategoricalColumn>(&schema.columns[k])) {
            for (std::size_t j = 0; j < cat->categories.size(); ++j) lookup[k].emplace(cat->categories[j], j);
        }
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& rec = table.rows.at(rows[i]);
        const auto g = std::find(schema.protected_groups.begin(), schema.protected_groups.end(), rec[pc]);
        if (g == schema.protected_groups.end()) {
            throw DataError("protected value '" + rec[pc] + "' is not a known group");
        }
        out.s.push_back(static_cast<int>(g - schema.protected_groups.begin()));
        out.y.push_back(rec[lc] == schema.positive_label ? 1 : -1);
        for (std::size_t k = 0; k < schema.columns.size(); ++k) {
            const auto& b = blocks[k];
            const std::string& value = rec[src[k]];
            if (const auto* con = std::get_if<ContinuousColumn>(&schema.columns[k])) {
                out.x(i, b.offset) = (parse_double(value, con->name) - con->mean) / con->stddev;
            } else {
                auto it = lookup[k].find(value);
                if (it == lookup[k].end()) {
                    if (stats) ++stats->unknown_categories[b.name];
                    continue;
                }
                out.x(i, b.offset + it->second) = 1.0;
            }
        }
    }
    return out;
}

inline TabularDataset transform(const RawTable& table, const FeatureSchema& schema, TransformStats* stats = nullptr) {
    return transform(table, schema, detail::all_rows(table), stats);
}

// Fit on all records and transform them.
inline TabularDataset preprocess(const RawTable& table, const PreprocessOptions& opts = {}) {
    return transform(table, fit_schema(table, opts));
}

inline constexpr const char* unknown_category = "<unknown>";

// Index of the largest entry of a one-hot (or relaxed) block; ties go to the
// first. An all-zero raw block has no category.
inline std::ptrdiff_t block_argmax(std::span<const double> row, const FeatureBlock& b, bool allow_all_zero = false) {
    std::size_t best = 0;
    bool nonzero = false;
    for (std::size_t j = 0; j < b.width; ++j) {
        const double v = row[b.offset + j];
        if (v != 0.0) nonzero = true;
        if (v > row[b.offset + best]) best = j;
    }
    if (!nonzero && allow_all_zero) return -1;
    return static_cast<std::ptrdiff_t>(best);
}

// Maps one feature row back to raw feature values, in schema column order:
// continuous columns un-standardised and rendered exactly, categorical columns
// by per-block argmax.
inline std::vector<std::string> inverse_transform_row(std::span<const double> row, const FeatureSchema& schema) {
    std::vector<std::string> out;
    const auto blocks = schema.blocks();
    for (std::size_t k = 0; k < schema.columns.size(); ++k) {
        const auto& b = blocks[k];
        if (const auto* con = std::get_if<ContinuousColumn>(&schema.columns[k])) {
            out.push_back(format_double(row[b.offset] * con->stddev + con->mean));
        } else {
            const auto j = block_argmax(row, b, true);
            out.push_back(j < 0 ? unknown_category : b.categories[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

} // namespace fairhsic::data
