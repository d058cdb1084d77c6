#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/matrix.hpp"

namespace fairhsic::kernels {

using diff::Matrix;

enum class HsicEstimator { biased, unbiased };

inline std::string_view to_string(HsicEstimator e) noexcept {
    return e == HsicEstimator::biased ? "biased" : "unbiased";
}

inline HsicEstimator parse_estimator(std::string_view s) {
    if (s == "biased") return HsicEstimator::biased;
    if (s == "unbiased") return HsicEstimator::unbiased;
    throw InvalidArgument("unknown HSIC estimator '" + std::string(s) + "'");
}

struct HsicValue {
    double value = 0.0;
    HsicEstimator estimator = HsicEstimator::biased;
    std::size_t n = 0;
};

namespace detail {

inline void check_pair(const Matrix& k, const Matrix& l, std::size_t min_n, const char* what) {
    if (k.rows() != k.cols() || l.rows() != l.cols() || k.rows() != l.rows()) {
        throw ShapeError(std::string(what) + ": kernel matrices must be square and equal-sized, got " +
                               k.shape_string() + " and " + l.shape_string());
    }
    if (k.rows() < min_n) {
        throw InvalidArgument(std::string(what) + " needs N >= " + std::to_string(min_n) + ", got " +
                              std::to_string(k.rows()));
    }
}

} // namespace detail

// H K H without forming H: subtract row and column means, add back the grand mean.
inline Matrix double_center(const Matrix& k) {
    const auto n = static_cast<double>(k.rows());
    Matrix out = k;
    auto e = out.eigen();
    const Eigen::VectorXd row_mean = k.eigen().rowwise().sum() / n;
    const Eigen::RowVectorXd col_mean = k.eigen().colwise().sum() / n;
    const double grand = k.eigen().sum() / (n * n);
    e.colwise() -= row_mean;
    e.rowwise() -= col_mean;
    e.array() += grand;
    return out;
}

// (N-1)^-2 tr(H K H L), evaluated as <HKH, HLH>_F (H is idempotent). Centring
// both arguments makes the result exactly symmetric in K and L.
inline HsicValue hsic_biased(const Matrix& k, const Matrix& l) {
    detail::check_pair(k, l, 2, "hsic_biased");
    const auto n = static_cast<double>(k.rows());
    const Matrix kc = double_center(k);
    const Matrix lc = double_center(l);
    const double tr = kc.eigen().cwiseProduct(lc.eigen()).sum();
    return {tr / ((n - 1.0) * (n - 1.0)), HsicEstimator::biased, k.rows()};
}

// Zero-diagonal U-statistic estimator:
//   [tr(K~L~) + 1'K~1 1'L~1 / ((N-1)(N-2)) - 2/(N-2) 1'K~L~1] / (N(N-3))
inline HsicValue hsic_unbiased(const Matrix& k, const Matrix& l) {
    detail::check_pair(k, l, 4, "hsic_unbiased");
    const auto n = static_cast<double>(k.rows());
    Matrix kt = k;
    Matrix lt = l;
    kt.eigen().diagonal().setZero();
    lt.eigen().diagonal().setZero();
    const double tr = kt.eigen().cwiseProduct(lt.eigen().transpose()).sum();
    const double sk = kt.eigen().sum();
    const double sl = lt.eigen().sum();
    const Eigen::VectorXd kt1 = kt.eigen().transpose().rowwise().sum();  // K~' 1
    const Eigen::VectorXd lt1 = lt.eigen().rowwise().sum();              // L~ 1
    const double cross = kt1.dot(lt1);                                   // 1' K~ L~ 1
    const double value = (tr + sk * sl / ((n - 1.0) * (n - 2.0)) - 2.0 / (n - 2.0) * cross) / (n * (n - 3.0));
    return {value, HsicEstimator::unbiased, k.rows()};
}

inline HsicValue hsic(const Matrix& k, const Matrix& l, HsicEstimator estimator) {
    return estimator == HsicEstimator::biased ? hsic_biased(k, l) : hsic_unbiased(k, l);
}

// Both estimators are linear in K for a fixed L: HSIC(K, L) = tr(K W(L)).
// This returns W(L), which lets a differentiable graph treat the protected
// kernel as a constant.
inline Matrix hsic_weight(const Matrix& l, HsicEstimator estimator) {
    const std::size_t n = l.rows();
    const auto nd = static_cast<double>(n);
    if (estimator == HsicEstimator::biased) {
        detail::check_pair(l, l, 2, "hsic_weight");
        Matrix w = double_center(l);
        w.eigen() /= (nd - 1.0) * (nd - 1.0);
        return w;
    }
    detail::check_pair(l, l, 4, "hsic_weight");
    Matrix lt = l;
    lt.eigen().diagonal().setZero();
    const double sl = lt.eigen().sum();
    const Eigen::VectorXd c = lt.eigen().rowwise().sum();
    // tr(K~ L~) = sum_{i!=j} K_ij L~_ji -> W_ji = L~_ji.
    // 1'K~1 = sum_{i!=j} K_ij          -> W_ji += sl / ((N-1)(N-2)) off-diagonal.
    // 1'K~L~1 = sum_{i!=j} K_ij c_j    -> W_ji -= 2/(N-2) c_j off-diagonal.
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            w(j, i) = lt(j, i) + sl / ((nd - 1.0) * (nd - 2.0)) - 2.0 / (nd - 2.0) * c(static_cast<Eigen::Index>(j));
        }
    }
    w.eigen() /= nd * (nd - 3.0);
    return w;
}

} // namespace fairhsic::kernels
