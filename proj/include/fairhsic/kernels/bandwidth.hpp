#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/matrix.hpp"

namespace fairhsic::kernels {

using diff::Matrix;

namespace detail {

inline double median_of(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace detail

// Median of all pairwise Euclidean distances between rows.
inline std::vector<double> pairwise_distances(const Matrix& points) {
    std::vector<double> d;
    const std::size_t n = points.rows();
    d.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < points.cols(); ++c) {
                const double t = points(i, c) - points(j, c);
                s += t * t;
            }
            d.push_back(std::sqrt(s));
        }
    }
    return d;
}

// Median heuristic bandwidth sigma. Uses a seeded subsample of at most
// `max_points` rows. If the median is zero but some distances are not (heavy
// duplication), the median of the nonzero distances is returned instead.
inline double median_heuristic(const Matrix& points, std::uint64_t seed = 0, std::size_t max_points = 1000) {
    if (points.rows() < 2) throw InvalidArgument("median heuristic needs at least two points");
    Matrix sample;
    if (points.rows() > max_points) {
        std::vector<std::size_t> idx(points.rows());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(max_points);
        std::sort(idx.begin(), idx.end());
        sample = diff::select_rows(points, idx);
    } else {
        sample = points;
    }
    std::vector<double> d = pairwise_distances(sample);
    double sigma = detail::median_of(d);
    if (sigma == 0.0) {
        std::erase(d, 0.0);
        if (d.empty()) {
            throw InvalidArgument("all points are identical; the median heuristic is undefined, set the bandwidth explicitly");
        }
        sigma = detail::median_of(d);
    }
    return sigma;
}

// gamma for exp(-gamma |a-b|^2) matching a Gaussian of bandwidth sigma.
inline double gamma_from_sigma(double sigma) { return 1.0 / (2.0 * sigma * sigma); }

} // namespace fairhsic::kernels
