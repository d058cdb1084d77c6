#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/data/preprocess.hpp"
#include "fairhsic/data/schema.hpp"
#include "fairhsic/diff/matrix.hpp"

namespace fairhsic::eval {

using diff::Matrix;

struct CategoryCount {
    std::string category;
    std::size_t before = 0;
    std::size_t after = 0;
};

struct FeatureDelta {
    std::string feature;
    std::vector<CategoryCount> categories;  // schema order, plus "<unknown>" when needed
    std::size_t changed_rows = 0;            // focus rows whose argmax category changed

    const CategoryCount* find(const std::string& category) const {
        for (const auto& c : categories) {
            if (c.category == category) return &c;
        }
        return nullptr;
    }
};

struct InterpretabilityDelta {
    std::size_t focus_size = 0;
    std::vector<std::size_t> focus_rows;
    std::vector<FeatureDelta> features;  // ranked by changed_rows, descending

    const FeatureDelta* find(const std::string& feature) const {
        for (const auto& f : features) {
            if (f.feature == feature) return &f;
        }
        return nullptr;
    }

    // 1-based rank of a feature in the ranking, 0 if absent.
    std::size_t rank_of(const std::string& feature) const {
        for (std::size_t i = 0; i < features.size(); ++i) {
            if (features[i].feature == feature) return i + 1;
        }
        return 0;
    }
};

// Focus subset: rows with y = +1 predicted negative on x and positive on x~.
// For each categorical block, compares the argmax category before and after
// translation on that subset.
inline InterpretabilityDelta interpretability_report(const Matrix& x, const Matrix& x_tilde,
                                                     std::span<const int> pred_x, std::span<const int> pred_x_tilde,
                                                     std::span<const int> y, const data::FeatureSchema& schema) {
    if (!x.same_shape(x_tilde)) throw ShapeError("x and x~ have different shapes");
    if (pred_x.size() != x.rows() || pred_x_tilde.size() != x.rows() || y.size() != x.rows()) {
        throw ShapeError("interpretability inputs must describe the same rows");
    }
    if (schema.feature_dim() != x.cols()) throw ShapeError("schema does not describe the feature matrix");
    InterpretabilityDelta out;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1 && pred_x[i] != 1 && pred_x_tilde[i] == 1) out.focus_rows.push_back(i);
    }
    out.focus_size = out.focus_rows.size();
    for (const auto& block : schema.blocks()) {
        if (!block.categorical) continue;
        FeatureDelta f;
        f.feature = block.name;
        for (const auto& c : block.categories) f.categories.push_back({c, 0, 0});
        CategoryCount unknown{data::unknown_category, 0, 0};
        for (std::size_t r : out.focus_rows) {
            const auto before = data::block_argmax(x.row_span(r), block, true);
            const auto after = data::block_argmax(x_tilde.row_span(r), block, true);
            (before < 0 ? unknown : f.categories[static_cast<std::size_t>(before)]).before++;
            (after < 0 ? unknown : f.categories[static_cast<std::size_t>(after)]).after++;
            if (before != after) ++f.changed_rows;
        }
        if (unknown.before || unknown.after) f.categories.push_back(unknown);
        out.features.push_back(std::move(f));
    }
    std::stable_sort(out.features.begin(), out.features.end(),
                     [](const FeatureDelta& a, const FeatureDelta& b) { return a.changed_rows > b.changed_rows; });
    return out;
}

// Plot-ready CSV: one row per (feature, category) with counts before/after.
inline std::string interpretability_csv(const InterpretabilityDelta& d, const std::string& prefix_columns = {},
                                        const std::string& prefix_values = {}) {
    std::ostringstream out;
    out << prefix_columns << "rank,feature,changed_rows,focus_size,category,count_x,count_x_tilde,delta\n";
    for (std::size_t i = 0; i < d.features.size(); ++i) {
        const auto& f = d.features[i];
        for (const auto& c : f.categories) {
            out << prefix_values << i + 1 << ',' << f.feature << ',' << f.changed_rows << ',' << d.focus_size << ','
                << c.category << ',' << c.before << ',' << c.after << ','
                << static_cast<long long>(c.after) - static_cast<long long>(c.before) << '\n';
        }
    }
    return out.str();
}

} // namespace fairhsic::eval
