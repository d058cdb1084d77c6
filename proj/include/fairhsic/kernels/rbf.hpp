#pragma once

#include <cmath>
#include <span>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/matrix.hpp"

namespace fairhsic::kernels {

using diff::Matrix;

// k(a, b) = exp(-gamma * |a - b|^2)
struct RbfKernel {
    double gamma = 1.0;

    explicit RbfKernel(double g) : gamma(g) {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("RBF gamma must be positive and finite");
    }

    double operator()(std::span<const double> a, std::span<const double> b) const {
        double d2 = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double t = a[k] - b[k];
            d2 += t * t;
        }
        return std::exp(-gamma * d2);
    }
};

// Gram matrix of the rows of `points`. Distances are taken as explicit
// differences, so the diagonal is exactly 1 and the result exactly symmetric.
inline Matrix rbf_gram(const Matrix& points, double gamma) {
    const RbfKernel k(gamma);
    if (points.rows() == 0) throw InvalidArgument("rbf_gram needs at least one point");
    if (!points.all_finite()) throw NonFiniteError("rbf_gram input contains non-finite values");
    const std::size_t n = points.rows();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = k(points.row_span(i), points.row_span(j));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

} // namespace fairhsic::kernels
