#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/core/hash.hpp"
#include "fairhsic/data/dataset.hpp"

namespace fairhsic::data {

struct SplitSpec {
    std::size_t train_n = 28222;
    std::size_t test_n = 15000;
    std::uint64_t seed = 0;
    std::size_t repeats = 10;

    // Train/test sizes for a dataset of n rows, using every row.
    static SplitSpec proportional(std::size_t n, double train_fraction, std::uint64_t seed, std::size_t repeats) {
        const auto train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
        return SplitSpec{train, n - train, seed, repeats};
    }
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded shuffle keyed by (seed, repeat_index); both sides returned in
// ascending row order.
inline SplitIndices split_indices(std::size_t n, const SplitSpec& spec, std::size_t repeat_index) {
    if (spec.train_n + spec.test_n > n) {
        throw InvalidArgument("split needs " + std::to_string(spec.train_n + spec.test_n) + " rows, dataset has " +
                              std::to_string(n));
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(combine_seed(spec.seed, repeat_index));
    std::shuffle(idx.begin(), idx.end(), rng);
    SplitIndices out;
    out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(spec.train_n));
    out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(spec.train_n),
                    idx.begin() + static_cast<std::ptrdiff_t>(spec.train_n + spec.test_n));
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

inline std::pair<TabularDataset, TabularDataset> split(const TabularDataset& dataset, const SplitSpec& spec,
                                                       std::size_t repeat_index) {
    const auto idx = split_indices(dataset.size(), spec, repeat_index);
    return {dataset.subset(idx.train), dataset.subset(idx.test)};
}

} // namespace fairhsic::data
