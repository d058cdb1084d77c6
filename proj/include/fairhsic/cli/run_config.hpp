#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairhsic/core/error.hpp"
#include "fairhsic/core/hash.hpp"
#include "fairhsic/data/synthetic.hpp"
#include "fairhsic/eval/benchmark.hpp"

namespace fairhsic::cli {

// Synthetic-data settings used by --synthetic runs.
struct SyntheticSettings {
    std::size_t n = 5000;
    double train_fraction = 0.7;
    data::SyntheticOptions generator;
};

// Every knob of a run. Defaults are the documented values; a JSON config may
// override any subset, unknown keys are rejected.
struct RunConfig {
    std::uint64_t seed = 0;
    std::vector<std::string> adult_files = {"adult.data", "adult.test"};
    std::string protected_column = "sex";
    data::SplitSpec split;  // seed is taken from `seed`
    translator::TransformerConfig transformer;
    baselines::AdversarialConfig adversarial;
    baselines::CvPlan cv;
    std::vector<std::string> representations = {"x", "x_tilde", "z"};
    std::vector<std::string> methods = {"LR", "SVM", "K&C LR", "K&C SVM"};
    bool interpretability = true;
    std::size_t threads = 1;
    SyntheticSettings synthetic;

    // Reduced-iteration profile: 10,000 training iterations for the
    // transformer and the adversarial baseline.
    void apply_fast_profile() {
        transformer.iterations = 10000;
        adversarial.iterations = 10000;
    }
};

namespace detail {

template <class F>
void for_each_key(const nlohmann::json& j, const std::string& section, F&& f) {
    if (!j.is_object()) throw InvalidArgument("config section '" + section + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!f(key, value)) throw InvalidArgument("unknown config key '" + section + key + "'");
    }
}

} // namespace detail

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json grid = c.cv.grid;
    return {{"seed", c.seed},
            {"adult_files", c.adult_files},
            {"protected_column", c.protected_column},
            {"split", {{"train_n", c.split.train_n}, {"test_n", c.split.test_n}, {"repeats", c.split.repeats}}},
            {"transformer", c.transformer},
            {"adversarial",
             {{"hidden_dim", c.adversarial.hidden_dim},
              {"code_dim", c.adversarial.code_dim},
              {"iterations", c.adversarial.iterations},
              {"batch_size", c.adversarial.batch_size},
              {"learning_rate", c.adversarial.learning_rate},
              {"alpha", c.adversarial.alpha},
              {"min_positive_per_batch", c.adversarial.min_positive_per_batch}}},
            {"cv", {{"folds", c.cv.folds}, {"grid", grid}}},
            {"benchmark",
             {{"representations", c.representations},
              {"methods", c.methods},
              {"interpretability", c.interpretability},
              {"threads", c.threads}}},
            {"synthetic",
             {{"n", c.synthetic.n},
              {"train_fraction", c.synthetic.train_fraction},
              {"proxy_strength", c.synthetic.generator.proxy_strength},
              {"feature_shift", c.synthetic.generator.feature_shift},
              {"label_penalty", c.synthetic.generator.label_penalty},
              {"noise", c.synthetic.generator.noise},
              {"threshold", c.synthetic.generator.threshold},
              {"married_fraction", c.synthetic.generator.married_fraction}}}};
}

inline RunConfig parse_run_config(const nlohmann::json& j, RunConfig c = {}) {
    detail::for_each_key(j, "", [&](const std::string& k, const nlohmann::json& v) {
        if (k == "seed") c.seed = v.get<std::uint64_t>();
        else if (k == "adult_files") c.adult_files = v.get<std::vector<std::string>>();
        else if (k == "protected_column") c.protected_column = v.get<std::string>();
        else if (k == "split") {
            detail::for_each_key(v, "split.", [&](const std::string& sk, const nlohmann::json& sv) {
                if (sk == "train_n") c.split.train_n = sv.get<std::size_t>();
                else if (sk == "test_n") c.split.test_n = sv.get<std::size_t>();
                else if (sk == "repeats") c.split.repeats = sv.get<std::size_t>();
                else return false;
                return true;
            });
        } else if (k == "transformer") {
            try {
                from_json(v, c.transformer);
            } catch (const InvalidArgument& e) {
                throw InvalidArgument(std::string(e.what()) + " (section 'transformer')");
            }
        } else if (k == "adversarial") {
            detail::for_each_key(v, "adversarial.", [&](const std::string& ak, const nlohmann::json& av) {
                auto& a = c.adversarial;
                if (ak == "hidden_dim") a.hidden_dim = av.get<std::size_t>();
                else if (ak == "code_dim") a.code_dim = av.get<std::size_t>();
                else if (ak == "iterations") a.iterations = av.get<std::size_t>();
                else if (ak == "batch_size") a.batch_size = av.get<std::size_t>();
                else if (ak == "learning_rate") a.learning_rate = av.get<double>();
                else if (ak == "alpha") a.alpha = av.get<double>();
                else if (ak == "min_positive_per_batch") a.min_positive_per_batch = av.get<std::size_t>();
                else return false;
                return true;
            });
        } else if (k == "cv") {
            detail::for_each_key(v, "cv.", [&](const std::string& ck, const nlohmann::json& cv) {
                if (ck == "folds") c.cv.folds = cv.get<std::size_t>();
                else if (ck == "grid") c.cv.grid = cv.get<std::vector<double>>();
                else return false;
                return true;
            });
        } else if (k == "benchmark") {
            detail::for_each_key(v, "benchmark.", [&](const std::string& bk, const nlohmann::json& bv) {
                if (bk == "representations") c.representations = bv.get<std::vector<std::string>>();
                else if (bk == "methods") c.methods = bv.get<std::vector<std::string>>();
                else if (bk == "interpretability") c.interpretability = bv.get<bool>();
                else if (bk == "threads") c.threads = bv.get<std::size_t>();
                else return false;
                return true;
            });
        } else if (k == "synthetic") {
            detail::for_each_key(v, "synthetic.", [&](const std::string& sk, const nlohmann::json& sv) {
                auto& s = c.synthetic;
                if (sk == "n") s.n = sv.get<std::size_t>();
                else if (sk == "train_fraction") s.train_fraction = sv.get<double>();
                else if (sk == "proxy_strength") s.generator.proxy_strength = sv.get<double>();
                else if (sk == "feature_shift") s.generator.feature_shift = sv.get<double>();
                else if (sk == "label_penalty") s.generator.label_penalty = sv.get<double>();
                else if (sk == "noise") s.generator.noise = sv.get<double>();
                else if (sk == "threshold") s.generator.threshold = sv.get<double>();
                else if (sk == "married_fraction") s.generator.married_fraction = sv.get<double>();
                else return false;
                return true;
            });
        } else {
            return false;
        }
        return true;
    });
    return c;
}

inline RunConfig parse_run_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_run_config(j);
}

// Hash of the fully resolved configuration (defaults and overrides applied).
inline std::string config_hash(const RunConfig& c) { return sha256_hex(to_json(c).dump()); }

inline eval::BenchmarkOptions benchmark_options(const RunConfig& c, bool synthetic) {
    eval::BenchmarkOptions o;
    o.split = synthetic ? data::SplitSpec::proportional(c.synthetic.n, c.synthetic.train_fraction, c.seed,
                                                        c.split.repeats)
                        : c.split;
    o.split.seed = c.seed;
    o.transformer = c.transformer;
    o.adversarial = c.adversarial;
    o.cv = c.cv;
    o.representations.clear();
    for (const auto& r : c.representations) o.representations.push_back(eval::parse_representation(r));
    o.methods.clear();
    for (const auto& m : c.methods) o.methods.push_back(eval::parse_method(m));
    o.interpretability = c.interpretability;
    o.threads = c.threads;
    return o;
}

} // namespace fairhsic::cli
