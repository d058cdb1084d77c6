#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "fairhsic/core/error.hpp"
#include "fairhsic/kernels/hsic.hpp"

namespace fairhsic::translator {

// Hyperparameters of the translation network and its training loop.
struct TransformerConfig {
    std::size_t input_dim = 0;  // 0: taken from the training data
    std::size_t hidden_dim = 40;
    std::size_t code_dim = 40;
    double lambda1 = 1e-4;  // reconstruction weight
    double lambda2 = 100.0; // decomposition weight
    std::size_t iterations = 50000;
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;
    std::size_t min_positive_per_batch = 8;
    std::uint64_t seed = 0;
    kernels::HsicEstimator hsic_estimator = kernels::HsicEstimator::biased;
    std::size_t rff_dim = 200;
    double rff_sigma = 0.0;       // 0: median heuristic on the training inputs
    double feature_gamma = 0.0;   // 0: median heuristic on the first usable batch
    double protected_gamma = 0.5;
    std::size_t log_every = 100;

    void validate() const {
        if (hidden_dim == 0 || code_dim == 0) throw InvalidArgument("network dimensions must be at least 1");
        if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw InvalidArgument("loss weights must be non-negative");
        if (batch_size <= min_positive_per_batch) {
            throw InvalidArgument("batch_size must exceed min_positive_per_batch");
        }
        if (min_positive_per_batch < 4 && hsic_estimator == kernels::HsicEstimator::unbiased) {
            throw InvalidArgument("unbiased HSIC needs min_positive_per_batch >= 4");
        }
        if (min_positive_per_batch < 2) throw InvalidArgument("min_positive_per_batch must be at least 2");
        if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
        if (rff_dim == 0) throw InvalidArgument("rff_dim must be at least 1");
        if (rff_sigma < 0.0 || feature_gamma < 0.0) throw InvalidArgument("bandwidth overrides must be >= 0");
        if (!(protected_gamma > 0.0)) throw InvalidArgument("protected_gamma must be positive");
        if (log_every == 0) throw InvalidArgument("log_every must be at least 1");
    }

    friend bool operator==(const TransformerConfig&, const TransformerConfig&) = default;
};

inline void to_json(nlohmann::json& j, const TransformerConfig& c) {
    j = nlohmann::json{{"input_dim", c.input_dim},
                       {"hidden_dim", c.hidden_dim},
                       {"code_dim", c.code_dim},
                       {"lambda1", c.lambda1},
                       {"lambda2", c.lambda2},
                       {"iterations", c.iterations},
                       {"batch_size", c.batch_size},
                       {"learning_rate", c.learning_rate},
                       {"min_positive_per_batch", c.min_positive_per_batch},
                       {"seed", c.seed},
                       {"hsic_estimator", std::string(kernels::to_string(c.hsic_estimator))},
                       {"rff_dim", c.rff_dim},
                       {"rff_sigma", c.rff_sigma},
                       {"feature_gamma", c.feature_gamma},
                       {"protected_gamma", c.protected_gamma},
                       {"log_every", c.log_every}};
}

// Reads any subset of the keys over the defaults; unknown keys are rejected.
inline void from_json(const nlohmann::json& j, TransformerConfig& c) {
    if (!j.is_object()) throw InvalidArgument("transformer config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "input_dim") c.input_dim = value.get<std::size_t>();
        else if (key == "hidden_dim") c.hidden_dim = value.get<std::size_t>();
        else if (key == "code_dim") c.code_dim = value.get<std::size_t>();
        else if (key == "lambda1") c.lambda1 = value.get<double>();
        else if (key == "lambda2") c.lambda2 = value.get<double>();
        else if (key == "iterations") c.iterations = value.get<std::size_t>();
        else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
        else if (key == "learning_rate") c.learning_rate = value.get<double>();
        else if (key == "min_positive_per_batch") c.min_positive_per_batch = value.get<std::size_t>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "hsic_estimator") c.hsic_estimator = kernels::parse_estimator(value.get<std::string>());
        else if (key == "rff_dim") c.rff_dim = value.get<std::size_t>();
        else if (key == "rff_sigma") c.rff_sigma = value.get<double>();
        else if (key == "feature_gamma") c.feature_gamma = value.get<double>();
        else if (key == "protected_gamma") c.protected_gamma = value.get<double>();
        else if (key == "log_every") c.log_every = value.get<std::size_t>();
        else throw InvalidArgument("unknown transformer config key '" + key + "'");
    }
}

} // namespace fairhsic::translator
