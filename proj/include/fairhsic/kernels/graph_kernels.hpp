#pragma once

#include <cstddef>

#include "fairhsic/diff/graph.hpp"
#include "fairhsic/kernels/hsic.hpp"

namespace fairhsic::kernels {

// Differentiable RBF Gram matrix of the rows of `points` (an n-row node):
// K = exp(-gamma (sq 1' + 1 sq' - 2 P P')), sq = row norms squared.
inline diff::Var rbf_gram_node(diff::Graph& g, diff::Var points, std::size_t n, double gamma) {
    const diff::Var sq = g.row_sum(g.square(points));
    const diff::Var spread = g.matmul(sq, g.constant(Matrix::ones(1, n)));
    const diff::Var gram = g.matmul(points, g.transpose(points));
    const diff::Var d2 = g.sub(g.add(spread, g.transpose(spread)), g.scale(gram, 2.0));
    return g.exp(g.scale(d2, -gamma));
}

// HSIC(K, L) for a differentiable K and a constant L, via tr(K W(L)).
inline diff::Var hsic_node(diff::Graph& g, diff::Var k, const Matrix& l, HsicEstimator estimator) {
    return g.trace_product(k, g.constant(hsic_weight(l, estimator)));
}

} // namespace fairhsic::kernels
