#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fairhsic/baselines/linear.hpp"
#include "fairhsic/core/error.hpp"
#include "fairhsic/core/hash.hpp"

namespace fairhsic::baselines {

struct CvPlan {
    std::size_t folds = 3;
    std::vector<double> grid = {1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
    std::uint64_t seed = 0;
};

struct CvResult {
    double best_c = 0.0;
    std::vector<double> mean_accuracy;  // per grid value
};

// Stratified fold ids. Within each class, rows are ordered by a seeded hash
// of their content and dealt round-robin, so the assignment of a given row
// does not depend on where it sits in the input.
inline std::vector<std::size_t> stratified_folds(const Matrix& x, std::span<const int> y, std::size_t folds,
                                                 std::uint64_t seed) {
    std::vector<std::size_t> fold(y.size());
    for (int label : {-1, 1}) {
        std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == label) keyed.emplace_back(hash_row(seed, x.row_span(i)), i);
        }
        std::sort(keyed.begin(), keyed.end());
        for (std::size_t k = 0; k < keyed.size(); ++k) fold[keyed[k].second] = k % folds;
    }
    return fold;
}

inline double accuracy_of(const std::vector<int>& pred, std::span<const int> y) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
    return static_cast<double>(correct) / static_cast<double>(y.size());
}

// Selects C by mean validation accuracy over stratified folds; ties go to
// the smaller C.
inline CvResult cross_validate(const Matrix& x, std::span<const int> y, LinearKind kind, const CvPlan& plan,
                               std::span<const double> sample_weights = {}, const LinearOptions& options = {}) {
    if (plan.grid.empty()) throw InvalidArgument("cross-validation grid is empty");
    if (plan.folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
    if (x.rows() < plan.folds) throw InvalidArgument("fewer rows than folds");
    std::vector<double> grid = plan.grid;
    std::sort(grid.begin(), grid.end());
    CvResult out;
    if (grid.size() == 1) {
        out.best_c = grid[0];
        return out;
    }
    const auto fold = stratified_folds(x, y, plan.folds, plan.seed);
    out.mean_accuracy.assign(grid.size(), 0.0);
    for (std::size_t f = 0; f < plan.folds; ++f) {
        std::vector<std::size_t> tr, va;
        for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == f ? va : tr).push_back(i);
        const Matrix xtr = diff::select_rows(x, tr), xva = diff::select_rows(x, va);
        std::vector<int> ytr, yva;
        std::vector<double> wtr;
        for (std::size_t i : tr) {
            ytr.push_back(y[i]);
            if (!sample_weights.empty()) wtr.push_back(sample_weights[i]);
        }
        for (std::size_t i : va) yva.push_back(y[i]);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const LinearModel m = fit_linear(xtr, ytr, kind, grid[g], wtr, options);
            out.mean_accuracy[g] += accuracy_of(m.predict(xva), yva) / static_cast<double>(plan.folds);
        }
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        if (out.mean_accuracy[g] > out.mean_accuracy[best]) best = g;
    }
    out.best_c = grid[best];
    return out;
}

} // namespace fairhsic::baselines
