#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/data/schema.hpp"
#include "fairhsic/diff/matrix.hpp"

namespace fairhsic::data {

using diff::Matrix;

// Feature matrix with its protected group ids (0 .. groups-1) and labels in {+1, -1}.
struct TabularDataset {
    Matrix x;
    std::vector<int> s;
    std::vector<int> y;
    FeatureSchema schema;

    std::size_t size() const noexcept { return y.size(); }
    std::size_t dim() const noexcept { return x.cols(); }

    void validate() const {
        if (x.rows() != s.size() || x.rows() != y.size()) {
            throw DataError("dataset has " + std::to_string(x.rows()) + " feature rows, " + std::to_string(s.size()) +
                            " protected values and " + std::to_string(y.size()) + " labels");
        }
        if (!schema.columns.empty() && schema.feature_dim() != x.cols()) {
            throw DataError("schema describes " + std::to_string(schema.feature_dim()) + " features, matrix has " +
                            std::to_string(x.cols()));
        }
        for (int v : y) {
            if (v != 1 && v != -1) throw DataError("labels must be +1 or -1");
        }
        for (int v : s) {
            if (v < 0) throw DataError("protected group ids must be non-negative");
        }
    }

    TabularDataset subset(std::span<const std::size_t> rows) const {
        TabularDataset out{diff::select_rows(x, rows), {}, {}, schema};
        out.s.reserve(rows.size());
        out.y.reserve(rows.size());
        for (std::size_t r : rows) {
            out.s.push_back(s.at(r));
            out.y.push_back(y.at(r));
        }
        return out;
    }

    TabularDataset with_features(Matrix features) const {
        if (features.rows() != x.rows()) throw DataError("replacement features have the wrong row count");
        return TabularDataset{std::move(features), s, y, schema};
    }

    std::vector<std::size_t> positive_rows() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == 1) out.push_back(i);
        }
        return out;
    }
};

} // namespace fairhsic::data
