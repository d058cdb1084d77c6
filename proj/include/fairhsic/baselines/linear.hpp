#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/matrix.hpp"

namespace fairhsic::baselines {

using diff::Matrix;

enum class LinearKind { logistic, svm };

inline std::string_view to_string(LinearKind k) noexcept { return k == LinearKind::logistic ? "LR" : "SVM"; }

enum class LinearSolver {
    exact,       // Newton (logistic) / dual coordinate descent (svm)
    first_order  // full-batch Adam (logistic) / Adam on the hinge subgradient (svm)
};

struct LinearOptions {
    LinearSolver solver = LinearSolver::exact;
    double tolerance = 1e-6;          // gradient-norm stop (logistic, first-order solvers)
    double svm_tolerance = 0.1;       // projected-gradient spread stop of the svm dual solver
    std::size_t max_iterations = 0;   // 0: solver default
    double learning_rate = 1e-2;      // first-order solver only
    std::uint64_t seed = 0;           // coordinate order of the svm dual solver
};

// decision(x) = w'x + b; logistic predicts + at probability 0.5, svm at margin 0.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    LinearKind kind = LinearKind::logistic;
    double c = 1.0;
    bool converged = true;
    std::size_t iterations = 0;

    std::vector<double> decision(const Matrix& x) const {
        if (x.cols() != weights.size()) {
            throw ShapeError("linear model expects " + std::to_string(weights.size()) + " features, got " +
                             std::to_string(x.cols()));
        }
        const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
        Eigen::VectorXd out = x.eigen() * w;
        out.array() += bias;
        return {out.data(), out.data() + out.size()};
    }

    std::vector<int> predict(const Matrix& x) const {
        const auto f = decision(x);
        std::vector<int> out(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] > 0.0 ? 1 : -1;
        return out;
    }
};

namespace detail {

inline void check_inputs(const Matrix& x, std::span<const int> y, std::span<const double> w, double c) {
    if (x.rows() != y.size()) throw ShapeError("fit_linear: x has " + std::to_string(x.rows()) + " rows, y has " +
                                               std::to_string(y.size()));
    if (!w.empty() && w.size() != y.size()) throw ShapeError("fit_linear: sample weight length mismatch");
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("regularization C must be positive");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v == 1) pos = true;
        else if (v == -1) neg = true;
        else throw InvalidArgument("labels must be +1 or -1");
    }
    if (!pos || !neg) throw InvalidArgument("fit_linear needs both classes present");
    if (!x.all_finite()) throw NonFiniteError("fit_linear: non-finite features");
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("sample weights must be finite and >= 0");
    }
}

// Sample weights rescaled to mean 1, so a uniform rescaling of the weights
// never changes the fitted model.
inline Eigen::VectorXd normalized_weights(std::span<const double> w, std::size_t n) {
    Eigen::VectorXd out = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    if (w.empty()) return out;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) throw InvalidArgument("sample weights sum to zero");
    for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = w[i] * static_cast<double>(n) / total;
    return out;
}

inline double log1p_exp(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
inline double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

struct LogisticProblem {
    const Matrix& x;
    Eigen::VectorXd y;
    Eigen::VectorXd w;
    double inv_c;

    // theta = [weights; bias]
    Eigen::VectorXd margins(const Eigen::VectorXd& theta) const {
        const auto d = static_cast<Eigen::Index>(x.cols());
        Eigen::VectorXd m = x.eigen() * theta.head(d);
        m.array() += theta[d];
        return (m.array() * y.array()).matrix();
    }
    double value(const Eigen::VectorXd& theta) const {
        const Eigen::VectorXd m = margins(theta);
        double loss = 0.0;
        for (Eigen::Index i = 0; i < m.size(); ++i) loss += w[i] * log1p_exp(-m[i]);
        const auto d = static_cast<Eigen::Index>(x.cols());
        return loss + 0.5 * inv_c * theta.head(d).squaredNorm();
    }
    // Gradient, and optionally the per-row curvature weights of the Hessian.
    Eigen::VectorXd gradient(const Eigen::VectorXd& theta, Eigen::VectorXd* curvature = nullptr) const {
        const auto d = static_cast<Eigen::Index>(x.cols());
        const Eigen::VectorXd m = margins(theta);
        Eigen::VectorXd r(m.size());
        if (curvature) curvature->resize(m.size());
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            const double p = sigmoid(-m[i]);
            r[i] = -w[i] * y[i] * p;
            if (curvature) (*curvature)[i] = w[i] * p * (1.0 - p);
        }
        Eigen::VectorXd g(d + 1);
        g.head(d) = x.eigen().transpose() * r + inv_c * theta.head(d);
        g[d] = r.sum();
        return g;
    }
};

inline LinearModel to_model(const Eigen::VectorXd& theta, LinearKind kind, double c) {
    LinearModel m;
    const auto d = theta.size() - 1;
    m.weights.assign(theta.data(), theta.data() + d);
    m.bias = theta[d];
    m.kind = kind;
    m.c = c;
    return m;
}

inline LinearModel fit_logistic_newton(const LogisticProblem& p, double c, const LinearOptions& o) {
    const auto d = static_cast<Eigen::Index>(p.x.cols());
    const std::size_t max_it = o.max_iterations ? o.max_iterations : 200;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
    double f = p.value(theta);
    std::size_t it = 0;
    bool converged = false;
    Eigen::VectorXd curvature;
    for (; it < max_it; ++it) {
        const Eigen::VectorXd g = p.gradient(theta, &curvature);
        if (g.norm() < o.tolerance) {
            converged = true;
            break;
        }
        Eigen::MatrixXd h(d + 1, d + 1);
        const auto& xe = p.x.eigen();
        Eigen::MatrixXd xa(xe.rows(), d + 1);
        xa.leftCols(d) = xe;
        xa.col(d).setOnes();
        h.noalias() = xa.transpose() * curvature.asDiagonal() * xa;
        h.topLeftCorner(d, d).diagonal().array() += p.inv_c;
        h.diagonal().array() += 1e-12 * std::max(1.0, h.diagonal().maxCoeff());
        const Eigen::VectorXd step = h.ldlt().solve(-g);
        // Armijo backtracking.
        double t = 1.0;
        const double slope = g.dot(step);
        double f_new = p.value(theta + step);
        while (f_new > f + 1e-4 * t * slope && t > 1e-12) {
            t *= 0.5;
            f_new = p.value(theta + t * step);
        }
        if (!(f_new <= f)) {
            converged = g.norm() < 1e3 * o.tolerance;
            break;
        }
        theta += t * step;
        const double change = f - f_new;
        f = f_new;
        if (change <= 1e-15 * std::max(1.0, std::abs(f))) {
            converged = true;
            ++it;
            break;
        }
    }
    LinearModel m = to_model(theta, LinearKind::logistic, c);
    m.converged = converged;
    m.iterations = it;
    return m;
}

// Adam on the full-batch objective: the reference first-order loop.
template <class Grad>
LinearModel fit_first_order(Grad grad, Eigen::Index dim, LinearKind kind, double c, const LinearOptions& o) {
    const std::size_t max_it = o.max_iterations ? o.max_iterations : 20000;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim + 1);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(dim + 1), v = Eigen::VectorXd::Zero(dim + 1);
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::size_t it = 0;
    bool converged = false;
    for (; it < max_it; ++it) {
        const Eigen::VectorXd g = grad(theta);
        if (g.norm() < o.tolerance) {
            converged = true;
            break;
        }
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g.cwiseProduct(g);
        const double t = static_cast<double>(it + 1);
        const Eigen::VectorXd mh = m / (1 - std::pow(b1, t));
        const Eigen::VectorXd vh = v / (1 - std::pow(b2, t));
        theta.array() -= o.learning_rate * mh.array() / (vh.array().sqrt() + eps);
    }
    LinearModel model = to_model(theta, kind, c);
    model.converged = converged;
    model.iterations = it;
    return model;
}

// Dual coordinate descent for the L1-loss SVM
//   min (1/C) 1/2 |w|^2 + sum_i c_i max(0, 1 - y_i (w'x_i + b)),
// with the bias handled as a regularized constant feature.
inline LinearModel fit_svm_dual(const Matrix& x, const Eigen::VectorXd& y, const Eigen::VectorXd& cw, double c,
                                const LinearOptions& o) {
    const auto n = static_cast<Eigen::Index>(x.rows());
    const auto d = static_cast<Eigen::Index>(x.cols());
    const std::size_t max_epochs = o.max_iterations ? o.max_iterations : 1000;
    const double tol = o.svm_tolerance;
    const auto& xe = x.eigen();
    Eigen::VectorXd qii(n);
    for (Eigen::Index i = 0; i < n; ++i) qii[i] = xe.row(i).squaredNorm() + 1.0;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(o.seed);
    std::size_t epoch = 0;
    bool converged = false;
    for (; epoch < max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double max_pg = -std::numeric_limits<double>::infinity();
        double min_pg = std::numeric_limits<double>::infinity();
        for (Eigen::Index i : order) {
            const double upper = c * cw[i];
            if (upper <= 0.0) continue;
            const double g = y[i] * (xe.row(i).dot(w.head(d)) + w[d]) - 1.0;
            double pg = g;
            if (alpha[i] <= 0.0) pg = std::min(g, 0.0);
            else if (alpha[i] >= upper) pg = std::max(g, 0.0);
            max_pg = std::max(max_pg, pg);
            min_pg = std::min(min_pg, pg);
            if (pg == 0.0) continue;
            const double old = alpha[i];
            alpha[i] = std::clamp(old - g / qii[i], 0.0, upper);
            const double delta = (alpha[i] - old) * y[i];
            w.head(d) += delta * xe.row(i).transpose();
            w[d] += delta;
        }
        if (max_pg - min_pg < tol) {
            converged = true;
            ++epoch;
            break;
        }
    }
    LinearModel m = to_model(w, LinearKind::svm, c);
    m.converged = converged;
    m.iterations = epoch;
    return m;
}

} // namespace detail

// Weighted, L2-regularized linear classifier:
//   logistic: sum_i c_i log(1 + exp(-y_i f(x_i))) + (1/C) 1/2 |w|^2
//   svm:      sum_i c_i max(0, 1 - y_i f(x_i))     + (1/C) 1/2 |w|^2
// with c_i the sample weights rescaled to mean 1 (all ones by default).
inline LinearModel fit_linear(const Matrix& x, std::span<const int> y, LinearKind kind, double c,
                              std::span<const double> sample_weights = {}, const LinearOptions& options = {}) {
    detail::check_inputs(x, y, sample_weights, c);
    const auto n = static_cast<Eigen::Index>(x.rows());
    const auto d = static_cast<Eigen::Index>(x.cols());
    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) yv[i] = static_cast<double>(y[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd cw = detail::normalized_weights(sample_weights, x.rows());
    const double inv_c = 1.0 / c;

    if (kind == LinearKind::logistic) {
        const detail::LogisticProblem p{x, yv, cw, inv_c};
        if (options.solver == LinearSolver::exact) return detail::fit_logistic_newton(p, c, options);
        return detail::fit_first_order([&](const Eigen::VectorXd& t) { return p.gradient(t); }, d,
                                       LinearKind::logistic, c, options);
    }
    if (options.solver == LinearSolver::exact) return detail::fit_svm_dual(x, yv, cw, c, options);
    auto subgradient = [&](const Eigen::VectorXd& t) {
        Eigen::VectorXd f = x.eigen() * t.head(d);
        f.array() += t[d];
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (yv[i] * f[i] < 1.0) r[i] = -cw[i] * yv[i];
        }
        Eigen::VectorXd g(d + 1);
        g.head(d) = x.eigen().transpose() * r + inv_c * t.head(d);
        g[d] = r.sum();
        return g;
    };
    return detail::fit_first_order(subgradient, d, LinearKind::svm, c, options);
}

} // namespace fairhsic::baselines
