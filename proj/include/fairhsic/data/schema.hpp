#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fairhsic/core/error.hpp"
#include "fairhsic/core/hash.hpp"

namespace fairhsic::data {

struct ContinuousColumn {
    std::string name;
    double mean = 0.0;
    double stddev = 1.0;

    friend bool operator==(const ContinuousColumn&, const ContinuousColumn&) = default;
};

struct CategoricalColumn {
    std::string name;
    std::vector<std::string> categories;

    friend bool operator==(const CategoricalColumn&, const CategoricalColumn&) = default;
};

using ColumnDescriptor = std::variant<ContinuousColumn, CategoricalColumn>;

inline const std::string& column_name(const ColumnDescriptor& c) {
    return std::visit([](const auto& col) -> const std::string& { return col.name; }, c);
}

// Contiguous slice of the feature matrix produced by one source column.
struct FeatureBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t width = 0;
    bool categorical = false;
    std::vector<std::string> categories;
};

struct FeatureSchema {
    std::vector<ColumnDescriptor> columns;
    std::string protected_column;
    std::vector<std::string> protected_groups;  // group id -> raw value
    std::string label_column;
    std::string positive_label;

    std::size_t feature_dim() const {
        std::size_t d = 0;
        for (const auto& b : blocks()) d += b.width;
        return d;
    }

    std::vector<FeatureBlock> blocks() const {
        std::vector<FeatureBlock> out;
        std::size_t offset = 0;
        for (const auto& c : columns) {
            if (const auto* cat = std::get_if<CategoricalColumn>(&c)) {
                out.push_back({cat->name, offset, cat->categories.size(), true, cat->categories});
                offset += cat->categories.size();
            } else {
                out.push_back({column_name(c), offset, 1, false, {}});
                offset += 1;
            }
        }
        return out;
    }

    FeatureBlock block(const std::string& name) const {
        for (const auto& b : blocks()) {
            if (b.name == name) return b;
        }
        throw DataError("schema has no feature block '" + name + "'");
    }

    std::vector<std::string> feature_names() const {
        std::vector<std::string> names;
        for (const auto& c : columns) {
            if (const auto* cat = std::get_if<CategoricalColumn>(&c)) {
                for (const auto& v : cat->categories) names.push_back(cat->name + "=" + v);
            } else {
                names.push_back(column_name(c));
            }
        }
        return names;
    }

    std::string hash() const;

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

inline void to_json(nlohmann::json& j, const FeatureSchema& s) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : s.columns) {
        if (const auto* cat = std::get_if<CategoricalColumn>(&c)) {
            cols.push_back({{"kind", "categorical"}, {"name", cat->name}, {"categories", cat->categories}});
        } else {
            const auto& con = std::get<ContinuousColumn>(c);
            cols.push_back({{"kind", "continuous"}, {"name", con.name}, {"mean", con.mean}, {"std", con.stddev}});
        }
    }
    j = nlohmann::json{{"columns", cols},
                       {"protected_column", s.protected_column},
                       {"protected_groups", s.protected_groups},
                       {"label_column", s.label_column},
                       {"positive_label", s.positive_label}};
}

inline void from_json(const nlohmann::json& j, FeatureSchema& s) {
    s = FeatureSchema{};
    for (const auto& c : j.at("columns")) {
        const auto kind = c.at("kind").get<std::string>();
        if (kind == "categorical") {
            s.columns.emplace_back(
                CategoricalColumn{c.at("name").get<std::string>(), c.at("categories").get<std::vector<std::string>>()});
        } else if (kind == "continuous") {
            s.columns.emplace_back(
                ContinuousColumn{c.at("name").get<std::string>(), c.at("mean").get<double>(), c.at("std").get<double>()});
        } else {
            throw DataError("unknown schema column kind '" + kind + "'");
        }
    }
    s.protected_column = j.at("protected_column").get<std::string>();
    s.protected_groups = j.at("protected_groups").get<std::vector<std::string>>();
    s.label_column = j.at("label_column").get<std::string>();
    s.positive_label = j.at("positive_label").get<std::string>();
}

inline std::string FeatureSchema::hash() const { return sha256_hex(nlohmann::json(*this).dump()); }

} // namespace fairhsic::data
