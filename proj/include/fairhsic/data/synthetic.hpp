#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fairhsic/core/error.hpp"
#include "fairhsic/data/dataset.hpp"
#include "fairhsic/data/preprocess.hpp"
#include "fairhsic/data/table.hpp"

namespace fairhsic::data {

// Biased tabular generator with a known fair counterpart.
//
// Rows come in matched pairs that share every latent draw and differ only in
// the protected group (A or B). A pair is married with probability
// `married_fraction`; a married pair's 'role' is, with probability
// `proxy_strength`, the group proxy (A -> "wife", B -> "husband"), otherwise
// one spouse role drawn independently of the group and shared by both rows.
// Unmarried pairs share "own-child" or "unmarried". Rows with role "wife" have
// their first continuous feature shifted down by `feature_shift` and their
// outcome penalized by `label_penalty`:
//   c1 = z1 - shift [wife],  c2 = z2,
//   label      = [z1 + 0.6 z2 + noise - (shift + penalty) [wife] > threshold]
//   fair_label = [z1 + 0.6 z2 + noise > threshold].
// The fair label is the outcome without any role effect. At proxy_strength 0
// both rows of a pair are identical apart from s, so s carries no signal.
struct SyntheticOptions {
    double proxy_strength = 1.0;
    double feature_shift = 1.0;
    double label_penalty = 0.5;
    double noise = 1.0;
    double threshold = 0.5;
    double married_fraction = 0.9;
};

inline std::vector<std::string> synthetic_columns() { return {"c1", "c2", "role", "group", "label", "fair_label"}; }

inline PreprocessOptions synthetic_preprocess_options() {
    PreprocessOptions o;
    o.protected_column = "group";
    o.label_column = "label";
    o.positive_label = "pos";
    o.continuous_columns = {"c1", "c2"};
    o.ignored_columns = {"fair_label"};
    return o;
}

inline RawTable synthesize_biased_records(std::size_t n, std::uint64_t seed, const SyntheticOptions& opts = {}) {
    if (n < 100) throw InvalidArgument("synthetic generator needs n >= 100");
    if (opts.proxy_strength < 0.0 || opts.proxy_strength > 1.0) {
        throw InvalidArgument("proxy_strength must lie in [0, 1]");
    }
    if (opts.married_fraction < 0.0 || opts.married_fraction > 1.0) {
        throw InvalidArgument("married_fraction must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RawTable t{synthetic_columns(), {}};
    t.rows.reserve(n);
    auto label = [](bool positive) { return std::string(positive ? "pos" : "neg"); };
    while (t.rows.size() < n) {
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        const double eps = opts.noise * normal(rng);
        const bool married = unit(rng) < opts.married_fraction;
        const bool proxied = married && unit(rng) < opts.proxy_strength;
        const bool coin = unit(rng) < 0.5;
        const std::string shared = married ? (coin ? "wife" : "husband") : (coin ? "own-child" : "unmarried");
        const double u = z1 + 0.6 * z2 + eps;
        for (const char* group : {"A", "B"}) {
            if (t.rows.size() == n) break;
            const std::string role = proxied ? (std::string(group) == "A" ? "wife" : "husband") : shared;
            const bool wife = role == "wife";
            const double shift = wife ? opts.feature_shift : 0.0;
            const double penalty = wife ? opts.label_penalty : 0.0;
            t.rows.push_back({format_double(z1 - shift), format_double(z2), role, group,
                              label(u - shift - penalty > opts.threshold), label(u > opts.threshold)});
        }
    }
    return t;
}

inline TabularDataset synthesize_biased(std::size_t n, std::uint64_t seed, const SyntheticOptions& opts = {}) {
    return preprocess(synthesize_biased_records(n, seed, opts), synthetic_preprocess_options());
}

// Ground-truth fair labels (+1/-1) of a generated table, in row order.
inline std::vector<int> fair_labels(const RawTable& t) {
    const std::size_t col = t.column_index("fair_label");
    std::vector<int> out;
    out.reserve(t.size());
    for (const auto& r : t.rows) out.push_back(r[col] == "pos" ? 1 : -1);
    return out;
}

} // namespace fairhsic::data
