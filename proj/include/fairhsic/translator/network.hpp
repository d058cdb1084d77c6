#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/graph.hpp"
#include "fairhsic/translator/config.hpp"

namespace fairhsic::translator {

using diff::Bindings;
using diff::Graph;
using diff::Matrix;
using diff::Var;

// Layer layout: encoder d -> hidden -> code, decoder code -> hidden -> d,
// predictor d -> 2 logits acting on the decoded output.
struct Layer {
    const char* weight;
    const char* bias;
    bool tanh;
};

inline constexpr Layer translation_layers[] = {
    {"encoder.w1", "encoder.b1", true},
    {"encoder.w2", "encoder.b2", true},
    {"decoder.w1", "decoder.b1", true},
    {"decoder.w2", "decoder.b2", false},
};
inline constexpr Layer predictor_layer{"predictor.w", "predictor.b", false};

struct TransformerParams {
    Bindings values;

    std::size_t input_dim() const { return values.at("encoder.w1").rows(); }
    bool all_finite() const {
        for (const auto& [name, m] : values) {
            if (!m.all_finite()) return false;
        }
        return true;
    }
    friend bool operator==(const TransformerParams&, const TransformerParams&) = default;
};

namespace detail {

inline void init_layer(Bindings& p, const Layer& layer, std::size_t in, std::size_t out, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(in)));
    Matrix w(in, out);
    for (double& v : w.data()) v = normal(rng);
    p[layer.weight] = std::move(w);
    p[layer.bias] = Matrix::zeros(1, out);
}

inline Matrix dense(const Matrix& x, const Bindings& p, const Layer& layer) {
    Matrix out = diff::matmul(x, p.at(layer.weight));
    const Matrix& b = p.at(layer.bias);
    out.eigen().rowwise() += b.eigen().row(0);
    if (layer.tanh) out.eigen() = out.eigen().array().tanh().matrix();
    return out;
}

inline Var dense_node(Graph& g, Var x, const Layer& layer) {
    const Var z = g.add(g.matmul(x, g.parameter(layer.weight)), g.parameter(layer.bias));
    return layer.tanh ? g.tanh(z) : z;
}

} // namespace detail

// Weights ~ N(0, 1/fan_in), zero biases, drawn from a seeded stream.
inline TransformerParams init_params(const TransformerConfig& config, std::size_t input_dim) {
    if (input_dim == 0) throw InvalidArgument("input dimension must be at least 1");
    std::mt19937_64 rng(config.seed);
    const std::size_t dims[] = {input_dim, config.hidden_dim, config.code_dim, config.hidden_dim, input_dim};
    TransformerParams p;
    for (std::size_t i = 0; i < 4; ++i) detail::init_layer(p.values, translation_layers[i], dims[i], dims[i + 1], rng);
    detail::init_layer(p.values, predictor_layer, input_dim, 2, rng);
    return p;
}

// x~ = decoder(encoder(x)).
inline Matrix translate(const TransformerParams& params, const Matrix& x) {
    if (x.cols() != params.input_dim()) {
        throw ShapeError("translate expects " + std::to_string(params.input_dim()) + " columns, got " +
                         std::to_string(x.cols()));
    }
    if (!x.all_finite()) throw NonFiniteError("translate input contains non-finite values");
    Matrix h = x;
    for (const auto& layer : translation_layers) h = detail::dense(h, params.values, layer);
    return h;
}

// Logits of the internal predictor on already-translated rows.
inline Matrix predictor_logits(const TransformerParams& params, const Matrix& x_tilde) {
    return detail::dense(x_tilde, params.values, predictor_layer);
}

struct NetworkNodes {
    Var x_tilde;
    Var logits;
};

inline NetworkNodes build_network(Graph& g, Var x) {
    Var h = x;
    for (const auto& layer : translation_layers) h = detail::dense_node(g, h, layer);
    return {h, detail::dense_node(g, h, predictor_layer)};
}

} // namespace fairhsic::translator
