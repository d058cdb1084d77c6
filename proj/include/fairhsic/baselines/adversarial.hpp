#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/core/hash.hpp"
#include "fairhsic/data/dataset.hpp"
#include "fairhsic/diff/adam.hpp"
#include "fairhsic/diff/graph.hpp"

namespace fairhsic::baselines {

using diff::Bindings;
using diff::Graph;
using diff::Var;

// Encoder d -> hidden -> code (tanh) shared by a label head and an adversary
// that predicts s from the code of y = +1 rows through a gradient-reversal
// connection of strength alpha.
struct AdversarialConfig {
    std::size_t hidden_dim = 40;
    std::size_t code_dim = 40;
    std::size_t iterations = 50000;
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;
    double alpha = 1.0;
    std::size_t min_positive_per_batch = 8;
    bool positive_only_adversary = true;
    std::uint64_t seed = 0;

    void validate() const {
        if (hidden_dim == 0 || code_dim == 0) throw InvalidArgument("adversarial dimensions must be at least 1");
        if (alpha < 0.0) throw InvalidArgument("adversary strength must be >= 0");
        if (batch_size == 0) throw InvalidArgument("batch_size must be positive");
        if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
    }
};

struct AdversarialModel {
    Bindings params;
    std::size_t groups = 2;

    // Latent embedding z = encoder(x).
    diff::Matrix embed(const diff::Matrix& x) const {
        if (x.cols() != params.at("enc.w1").rows()) throw ShapeError("embed: feature dimension mismatch");
        diff::Matrix h = x;
        for (const char* layer : {"enc.w1", "enc.w2"}) {
            const std::string name(layer);
            const std::string bias = "enc.b" + name.substr(name.size() - 1);
            h = diff::matmul(h, params.at(name));
            h.eigen().rowwise() += params.at(bias).eigen().row(0);
            h.eigen() = h.eigen().array().tanh().matrix();
        }
        return h;
    }
};

namespace detail {

inline void init_dense(Bindings& p, const std::string& w, const std::string& b, std::size_t in, std::size_t out,
                       std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(in)));
    diff::Matrix m(in, out);
    for (double& v : m.data()) v = normal(rng);
    p[w] = std::move(m);
    p[b] = diff::Matrix::zeros(1, out);
}

inline Var dense(Graph& g, Var x, const std::string& w, const std::string& b) {
    return g.add(g.matmul(x, g.parameter(w)), g.parameter(b));
}

} // namespace detail

inline AdversarialModel fit_adversarial_embedding(const data::TabularDataset& d, const AdversarialConfig& config) {
    config.validate();
    d.validate();
    if (d.size() == 0) throw InvalidArgument("adversarial baseline needs training rows");
    const std::set<int> groups_seen(d.s.begin(), d.s.end());
    if (d.positive_rows().empty()) throw InvalidArgument("adversarial baseline needs rows with y = +1");
    AdversarialModel model;
    model.groups = static_cast<std::size_t>(*groups_seen.rbegin()) + 1;
    std::mt19937_64 init_rng(combine_seed(config.seed, 11));
    detail::init_dense(model.params, "enc.w1", "enc.b1", d.dim(), config.hidden_dim, init_rng);
    detail::init_dense(model.params, "enc.w2", "enc.b2", config.hidden_dim, config.code_dim, init_rng);
    detail::init_dense(model.params, "head.w", "head.b", config.code_dim, 2, init_rng);
    detail::init_dense(model.params, "adv.w", "adv.b", config.code_dim, model.groups, init_rng);

    diff::AdamState adam;
    adam.options.learning_rate = config.learning_rate;
    std::mt19937_64 rng(combine_seed(config.seed, 12));
    std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        std::vector<std::size_t> rows(config.batch_size);
        for (auto& r : rows) r = pick(rng);
        std::vector<std::size_t> labels, adv_rows, groups;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const bool pos = d.y[rows[k]] == 1;
            labels.push_back(pos ? 1 : 0);
            if (pos || !config.positive_only_adversary) {
                adv_rows.push_back(k);
                groups.push_back(static_cast<std::size_t>(d.s[rows[k]]));
            }
        }
        Graph g;
        const Var x = g.input("x");
        const Var h = g.tanh(detail::dense(g, x, "enc.w1", "enc.b1"));
        const Var z = g.tanh(detail::dense(g, h, "enc.w2", "enc.b2"));
        Var loss = g.softmax_cross_entropy(detail::dense(g, z, "head.w", "head.b"), labels);
        if (adv_rows.size() >= config.min_positive_per_batch && config.alpha > 0.0) {
            const Var reversed = g.scale_gradient(g.row_gather(z, adv_rows), -config.alpha);
            loss = g.add(loss, g.softmax_cross_entropy(detail::dense(g, reversed, "adv.w", "adv.b"), groups));
        }
        Bindings b = model.params;
        b["x"] = diff::select_rows(d.x, rows);
        g.forward(b, loss);
        diff::adam_step(model.params, g.backward(), adam);
    }
    return model;
}

} // namespace fairhsic::baselines
