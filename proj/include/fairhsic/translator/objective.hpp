#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/graph.hpp"
#include "fairhsic/kernels/graph_kernels.hpp"
#include "fairhsic/kernels/hsic.hpp"
#include "fairhsic/kernels/rbf.hpp"
#include "fairhsic/kernels/rff.hpp"
#include "fairhsic/translator/config.hpp"
#include "fairhsic/translator/network.hpp"

namespace fairhsic::translator {

// The fixed feature map and kernel widths used by the decomposition term.
struct DecompositionKernels {
    kernels::RffMap phi;
    double feature_gamma = 1.0;
    double protected_gamma = 0.5;
    kernels::HsicEstimator estimator = kernels::HsicEstimator::biased;
};

struct LossBreakdown {
    double prediction = 0.0;
    double reconstruction = 0.0;
    double decomposition = 0.0;
    double total = 0.0;
};

// A minibatch: rows of x with protected group ids and labels in {+1, -1}.
struct Batch {
    Matrix x;
    std::vector<int> s;
    std::vector<int> y;

    std::vector<std::size_t> positive_rows() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == 1) out.push_back(i);
        }
        return out;
    }
};

inline Matrix protected_column(std::span<const int> s) {
    Matrix m(s.size(), 1);
    for (std::size_t i = 0; i < s.size(); ++i) m(i, 0) = static_cast<double>(s[i]);
    return m;
}

// phi(points) as a graph node: amp * cos(points theta + b).
inline Var rff_node(Graph& g, Var points, const kernels::RffMap& phi) {
    const Var proj = g.add(g.matmul(points, g.constant(phi.theta())), g.constant(phi.bias_row()));
    return g.scale(g.cos(proj), phi.amplitude());
}

// HSIC(P, S) - HSIC(R, S) with P = phi(x~), R = phi(x) - phi(x~), all rows
// assumed to carry y = +1. `x_tilde` is the n-row node of translated rows.
inline Var decomposition_node(Graph& g, Var x_tilde, const Matrix& x, std::span<const int> s,
                              const DecompositionKernels& k) {
    const std::size_t n = x.rows();
    const Matrix l = kernels::rbf_gram(protected_column(s), k.protected_gamma);
    const Var p = rff_node(g, x_tilde, k.phi);
    const Var r = g.sub(g.constant(k.phi.apply(x)), p);
    const Var hp = kernels::hsic_node(g, kernels::rbf_gram_node(g, p, n, k.feature_gamma), l, k.estimator);
    const Var hr = kernels::hsic_node(g, kernels::rbf_gram_node(g, r, n, k.feature_gamma), l, k.estimator);
    return g.sub(hp, hr);
}

struct ObjectiveNodes {
    Var prediction;
    Var reconstruction;
    std::optional<Var> decomposition;
    Var total;
};

inline std::vector<std::size_t> class_indices(std::span<const int> y) {
    std::vector<std::size_t> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] == 1 ? 1 : 0;
    return out;
}

// Builds the full objective on `batch`, bound to the input named "x".
// The decomposition term is omitted when the batch has fewer than
// config.min_positive_per_batch positive rows.
inline ObjectiveNodes build_objective(Graph& g, const Batch& batch, const TransformerConfig& config,
                                      const DecompositionKernels& k) {
    if (batch.x.rows() == 0) throw InvalidArgument("objective needs a nonempty batch");
    if (batch.s.size() != batch.x.rows() || batch.y.size() != batch.x.rows()) {
        throw ShapeError("batch has mismatched x, s and y lengths");
    }
    const double n = static_cast<double>(batch.x.rows());
    const Var x = g.input("x");
    const NetworkNodes net = build_network(g, x);
    ObjectiveNodes o{};
    o.prediction = g.softmax_cross_entropy(net.logits, class_indices(batch.y));
    o.reconstruction = g.scale(g.frobenius_sq(g.sub(x, net.x_tilde)), 1.0 / n);
    o.total = g.add(o.prediction, g.scale(o.reconstruction, config.lambda1));
    const auto pos = batch.positive_rows();
    if (pos.size() >= config.min_positive_per_batch) {
        std::vector<int> s_pos;
        for (std::size_t r : pos) s_pos.push_back(batch.s[r]);
        const Var xt_pos = g.row_gather(net.x_tilde, pos);
        o.decomposition = decomposition_node(g, xt_pos, diff::select_rows(batch.x, pos), s_pos, k);
        o.total = g.add(o.total, g.scale(*o.decomposition, config.lambda2));
    }
    return o;
}

inline Bindings bind(const TransformerParams& params, const Matrix& x) {
    Bindings b = params.values;
    b["x"] = x;
    return b;
}

// HSIC(P,S) - HSIC(R,S) on a batch of positive rows.
inline double decomposition_loss(const Matrix& x_pos, std::span<const int> s_pos, const TransformerParams& params,
                                 const DecompositionKernels& k, std::size_t min_rows = 2) {
    if (x_pos.rows() < min_rows || x_pos.rows() < 2) {
        throw InvalidArgument("decomposition loss needs at least " + std::to_string(min_rows) +
                              " positive rows, got " + std::to_string(x_pos.rows()));
    }
    if (s_pos.size() != x_pos.rows()) throw ShapeError("decomposition loss: x and s lengths differ");
    Graph g;
    const Var x = g.input("x");
    const Var out = decomposition_node(g, build_network(g, x).x_tilde, x_pos, s_pos, k);
    return g.forward(bind(params, x_pos), out).scalar_value();
}

// Evaluates every term of the objective on `batch`.
inline LossBreakdown objective(const Batch& batch, const TransformerParams& params, const TransformerConfig& config,
                               const DecompositionKernels& k) {
    Graph g;
    const ObjectiveNodes o = build_objective(g, batch, config, k);
    LossBreakdown out;
    out.total = g.forward(bind(params, batch.x), o.total).scalar_value();
    out.prediction = g.value(o.prediction).scalar_value();
    out.reconstruction = g.value(o.reconstruction).scalar_value();
    if (o.decomposition) out.decomposition = g.value(*o.decomposition).scalar_value();
    return out;
}

} // namespace fairhsic::translator
