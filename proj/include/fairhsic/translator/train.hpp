#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/core/hash.hpp"
#include "fairhsic/data/dataset.hpp"
#include "fairhsic/diff/adam.hpp"
#include "fairhsic/kernels/bandwidth.hpp"
#include "fairhsic/translator/objective.hpp"

namespace fairhsic::translator {

struct TrainRecord {
    std::size_t iteration = 0;
    LossBreakdown loss;
    std::size_t positives = 0;
    bool decomposition_skipped = false;
};

struct TrainResult {
    TransformerParams params;
    DecompositionKernels kernels;
    TransformerConfig config;  // with input_dim filled in
    std::vector<TrainRecord> history;
    std::size_t skipped_steps = 0;  // steps whose batch had too few positives
};

using ProgressCallback = std::function<void(const TrainRecord&)>;

// Independent seed streams derived from the configured seed.
enum class SeedStream : std::uint64_t { rff_bandwidth = 1, rff_map = 2, init = 3, batches = 4, feature_bandwidth = 5 };

inline std::uint64_t stream_seed(std::uint64_t seed, SeedStream stream) {
    return combine_seed(seed, static_cast<std::uint64_t>(stream));
}

inline Batch sample_batch(const data::TabularDataset& d, std::size_t size, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
    std::vector<std::size_t> rows(size);
    for (auto& r : rows) r = pick(rng);
    Batch b{diff::select_rows(d.x, rows), {}, {}};
    b.s.reserve(size);
    b.y.reserve(size);
    for (std::size_t r : rows) {
        b.s.push_back(d.s[r]);
        b.y.push_back(d.y[r]);
    }
    return b;
}

inline void check_trainable(const data::TabularDataset& d) {
    d.validate();
    if (d.size() == 0) throw InvalidArgument("cannot train on an empty dataset");
    const std::set<int> labels(d.y.begin(), d.y.end());
    if (labels.size() < 2) throw InvalidArgument("training data must contain both labels");
    const std::set<int> groups(d.s.begin(), d.s.end());
    if (groups.size() < 2) throw InvalidArgument("training data must contain at least two protected groups");
}

// Kernel widths for phi-space data: median heuristic on phi(x) of the first
// batch rows with y = +1, unless overridden in the config.
inline double initial_feature_gamma(const Batch& b, const kernels::RffMap& phi, const TransformerConfig& c) {
    if (c.feature_gamma > 0.0) return c.feature_gamma;
    const Matrix pos = diff::select_rows(b.x, b.positive_rows());
    const double sigma = kernels::median_heuristic(phi.apply(pos), stream_seed(c.seed, SeedStream::feature_bandwidth));
    return kernels::gamma_from_sigma(sigma);
}

// Minibatch Adam on the full objective. Deterministic given config.seed.
inline TrainResult train(const data::TabularDataset& dataset, TransformerConfig config,
                         const ProgressCallback& progress = {}) {
    check_trainable(dataset);
    if (config.input_dim == 0) config.input_dim = dataset.dim();
    if (config.input_dim != dataset.dim()) {
        throw ShapeError("config input_dim " + std::to_string(config.input_dim) + " does not match data dimension " +
                         std::to_string(dataset.dim()));
    }
    config.validate();

    TrainResult out;
    out.config = config;
    const double sigma = config.rff_sigma > 0.0
                             ? config.rff_sigma
                             : kernels::median_heuristic(dataset.x, stream_seed(config.seed, SeedStream::rff_bandwidth));
    out.kernels.phi =
        kernels::RffMap::sample(dataset.dim(), config.rff_dim, sigma, stream_seed(config.seed, SeedStream::rff_map));
    out.kernels.protected_gamma = config.protected_gamma;
    out.kernels.estimator = config.hsic_estimator;
    TransformerConfig init_config = config;
    init_config.seed = stream_seed(config.seed, SeedStream::init);
    out.params = init_params(init_config, dataset.dim());

    diff::AdamState adam;
    adam.options.learning_rate = config.learning_rate;
    std::mt19937_64 rng(stream_seed(config.seed, SeedStream::batches));
    bool gamma_frozen = false;

    for (std::size_t it = 0; it < config.iterations; ++it) {
        const Batch batch = sample_batch(dataset, config.batch_size, rng);
        const std::size_t positives = batch.positive_rows().size();
        const bool use_decomposition = positives >= config.min_positive_per_batch;
        if (use_decomposition && !gamma_frozen) {
            out.kernels.feature_gamma = initial_feature_gamma(batch, out.kernels.phi, config);
            gamma_frozen = true;
        }
        if (!use_decomposition) ++out.skipped_steps;

        Graph g;
        const ObjectiveNodes o = build_objective(g, batch, config, out.kernels);
        const double total = g.forward(bind(out.params, batch.x), o.total).scalar_value();
        if (it % config.log_every == 0) {
            TrainRecord rec;
            rec.iteration = it;
            rec.loss.total = total;
            rec.loss.prediction = g.value(o.prediction).scalar_value();
            rec.loss.reconstruction = g.value(o.reconstruction).scalar_value();
            rec.loss.decomposition = o.decomposition ? g.value(*o.decomposition).scalar_value() : 0.0;
            rec.positives = positives;
            rec.decomposition_skipped = !use_decomposition;
            out.history.push_back(rec);
            if (progress) progress(rec);
        }
        diff::adam_step(out.params.values, g.backward(), adam);
    }
    if (!out.params.all_finite()) throw NonFiniteError("training produced non-finite parameters");
    return out;
}

} // namespace fairhsic::translator
