#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fairhsic/baselines/adversarial.hpp"
#include "fairhsic/baselines/cross_validation.hpp"
#include "fairhsic/baselines/linear.hpp"
#include "fairhsic/baselines/reweighing.hpp"
#include "fairhsic/core/error.hpp"
#include "fairhsic/core/hash.hpp"
#include "fairhsic/data/preprocess.hpp"
#include "fairhsic/data/split.hpp"
#include "fairhsic/eval/interpretability.hpp"
#include "fairhsic/eval/metrics.hpp"
#include "fairhsic/translator/train.hpp"

namespace fairhsic::eval {

enum class Representation { x, x_tilde, z };
enum class Method { lr, svm, kc_lr, kc_svm, constant };

inline std::string_view to_string(Representation r) noexcept {
    switch (r) {
    case Representation::x: return "x";
    case Representation::x_tilde: return "x_tilde";
    case Representation::z: return "z";
    }
    return "?";
}

inline std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::lr: return "LR";
    case Method::svm: return "SVM";
    case Method::kc_lr: return "K&C LR";
    case Method::kc_svm: return "K&C SVM";
    case Method::constant: return "Constant";
    }
    return "?";
}

inline Representation parse_representation(std::string_view s) {
    for (auto r : {Representation::x, Representation::x_tilde, Representation::z}) {
        if (to_string(r) == s) return r;
    }
    throw InvalidArgument("unknown representation '" + std::string(s) + "'");
}

inline Method parse_method(std::string_view s) {
    for (auto m : {Method::lr, Method::svm, Method::kc_lr, Method::kc_svm, Method::constant}) {
        if (to_string(m) == s) return m;
    }
    throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

struct BenchmarkOptions {
    data::SplitSpec split;
    translator::TransformerConfig transformer;
    baselines::AdversarialConfig adversarial;
    baselines::CvPlan cv;
    baselines::LinearOptions linear;
    std::vector<Representation> representations = {Representation::x, Representation::x_tilde, Representation::z};
    std::vector<Method> methods = {Method::lr, Method::svm, Method::kc_lr, Method::kc_svm};
    bool interpretability = true;  // needs SVM on x and x_tilde
    std::size_t threads = 1;       // repeats run concurrently, results are order-independent
    std::function<void(const std::string&)> log;
};

struct CellResult {
    std::size_t repeat = 0;
    Representation representation = Representation::x;
    Method method = Method::lr;
    bool ok = false;
    std::string error;
    double accuracy = 0.0;
    double eq_opp = 0.0;
    GroupRates rates;
    double c = 0.0;
    bool converged = true;
};

struct TrainingSummary {
    std::size_t skipped_steps = 0;
    double decomposition_first = 0.0;  // median over the first 10% of logged iterations
    double decomposition_last = 0.0;   // median over the last 10%
};

struct RepeatResult {
    std::size_t repeat = 0;
    std::vector<CellResult> cells;
    std::optional<InterpretabilityDelta> interpretability;
    std::optional<TrainingSummary> training;
    std::vector<std::string> errors;  // stage-level failures (transformer, adversary, interpretability)
    std::vector<std::string> warnings;  // e.g. test categories never seen in the training split
    double test_base_rate = 0.0;      // fraction of test rows with y = +1
};

struct Aggregate {
    Representation representation = Representation::x;
    Method method = Method::lr;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    double accuracy_mean = 0.0;
    std::optional<double> accuracy_std;
    double eq_opp_mean = 0.0;
    std::optional<double> eq_opp_std;
};

struct EvalReport {
    std::vector<RepeatResult> repeats;
    std::vector<Aggregate> aggregates;

    const Aggregate* find(Representation r, Method m) const {
        for (const auto& a : aggregates) {
            if (a.representation == r && a.method == m) return &a;
        }
        return nullptr;
    }
};

// mean and sample standard deviation (n - 1); std omitted below two values.
inline std::pair<double, std::optional<double>> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {0.0, std::nullopt};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, std::nullopt};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline TrainingSummary summarize_training(const translator::TrainResult& r) {
    TrainingSummary s;
    s.skipped_steps = r.skipped_steps;
    std::vector<double> dec;
    for (const auto& h : r.history) {
        if (!h.decomposition_skipped) dec.push_back(h.loss.decomposition);
    }
    const std::size_t k = std::max<std::size_t>(1, dec.size() / 10);
    if (!dec.empty()) {
        s.decomposition_first = median({dec.begin(), dec.begin() + static_cast<std::ptrdiff_t>(k)});
        s.decomposition_last = median({dec.end() - static_cast<std::ptrdiff_t>(k), dec.end()});
    }
    return s;
}

// Dataset source: either a raw table re-preprocessed on every training split
// (statistics from train rows only), or an already-preprocessed dataset.
struct BenchmarkData {
    std::optional<data::RawTable> raw;
    data::PreprocessOptions preprocess;
    std::optional<data::TabularDataset> prepared;

    std::size_t size() const { return raw ? raw->size() : prepared->size(); }

    // Test-split categories absent from the training split are counted in
    // `unseen` (their one-hot block is left all-zero).
    std::pair<data::TabularDataset, data::TabularDataset> split(const data::SplitSpec& spec, std::size_t r,
                                                               data::TransformStats* unseen = nullptr) const {
        const auto idx = data::split_indices(size(), spec, r);
        if (!raw) return {prepared->subset(idx.train), prepared->subset(idx.test)};
        const data::FeatureSchema schema = data::fit_schema(*raw, preprocess, idx.train);
        return {data::transform(*raw, schema, idx.train), data::transform(*raw, schema, idx.test, unseen)};
    }
};

namespace detail {

inline bool wants(const std::vector<Representation>& v, Representation r) {
    return std::find(v.begin(), v.end(), r) != v.end();
}
inline bool wants(const std::vector<Method>& v, Method m) { return std::find(v.begin(), v.end(), m) != v.end(); }

struct Fitted {
    CellResult cell;
    std::vector<int> predictions;
};

inline Fitted run_cell(const diff::Matrix& xtr, const data::TabularDataset& train, const diff::Matrix& xte,
                       const data::TabularDataset& test, Representation rep, Method method,
                       const BenchmarkOptions& o, std::uint64_t cv_seed) {
    Fitted f;
    f.cell.representation = rep;
    f.cell.method = method;
    try {
        if (method == Method::constant) {
            std::size_t pos = 0;
            for (int v : train.y) pos += v == 1;
            const int label = 2 * pos >= train.size() ? 1 : -1;
            f.predictions.assign(test.size(), label);
        } else {
            const bool kc = method == Method::kc_lr || method == Method::kc_svm;
            const auto kind = (method == Method::lr || method == Method::kc_lr) ? baselines::LinearKind::logistic
                                                                                  : baselines::LinearKind::svm;
            std::vector<double> w;
            if (kc) w = baselines::kamiran_calders_weights(train.s, train.y);
            baselines::CvPlan plan = o.cv;
            plan.seed = cv_seed;
            const auto cv = baselines::cross_validate(xtr, train.y, kind, plan, w, o.linear);
            const auto model = baselines::fit_linear(xtr, train.y, kind, cv.best_c, w, o.linear);
            f.cell.c = cv.best_c;
            f.cell.converged = model.converged;
            f.predictions = model.predict(xte);
        }
        f.cell.accuracy = accuracy(f.predictions, test.y);
        f.cell.rates = group_rates(f.predictions, test.y, test.s);
        f.cell.eq_opp = eq_opp_gap(f.cell.rates);
        f.cell.ok = true;
    } catch (const std::exception& e) {
        f.cell.ok = false;
        f.cell.error = e.what();
    }
    return f;
}

} // namespace detail

inline std::uint64_t repeat_seed(std::uint64_t master, std::size_t repeat, std::uint64_t stage) {
    return combine_seed(combine_seed(master, repeat), stage);
}

inline RepeatResult run_repeat(const BenchmarkData& data, const BenchmarkOptions& o, std::size_t r) {
    RepeatResult out;
    out.repeat = r;
    auto log = [&](const std::string& msg) {
        if (o.log) o.log("repeat " + std::to_string(r) + ": " + msg);
    };
    data::TransformStats unseen;
    const auto [train, test] = data.split(o.split, r, &unseen);
    for (const auto& [column, count] : unseen.unknown_categories) {
        out.warnings.push_back(std::to_string(count) + " test rows have a '" + column +
                               "' category unseen in training; encoded as all-zero");
        log("warning: " + out.warnings.back());
    }
    std::size_t test_pos = 0;
    for (int v : test.y) test_pos += v == 1;
    out.test_base_rate = test.size() ? static_cast<double>(test_pos) / static_cast<double>(test.size()) : 0.0;

    std::map<Representation, std::pair<diff::Matrix, diff::Matrix>> reps;
    if (detail::wants(o.representations, Representation::x)) reps[Representation::x] = {train.x, test.x};
    if (detail::wants(o.representations, Representation::x_tilde)) {
        try {
            translator::TransformerConfig tc = o.transformer;
            tc.seed = repeat_seed(o.split.seed, r, 1);
            tc.input_dim = 0;
            log("training transformer");
            const auto trained = translator::train(train, tc);
            out.training = summarize_training(trained);
            reps[Representation::x_tilde] = {translator::translate(trained.params, train.x),
                                             translator::translate(trained.params, test.x)};
        } catch (const std::exception& e) {
            out.errors.push_back(std::string("transformer: ") + e.what());
        }
    }
    if (detail::wants(o.representations, Representation::z)) {
        try {
            baselines::AdversarialConfig ac = o.adversarial;
            ac.seed = repeat_seed(o.split.seed, r, 2);
            log("training adversarial embedding");
            const auto adv = baselines::fit_adversarial_embedding(train, ac);
            reps[Representation::z] = {adv.embed(train.x), adv.embed(test.x)};
        } catch (const std::exception& e) {
            out.errors.push_back(std::string("adversarial: ") + e.what());
        }
    }

    std::map<Representation, std::vector<int>> svm_predictions;
    for (Representation rep : o.representations) {
        for (Method m : o.methods) {
            auto it = reps.find(rep);
            if (it == reps.end()) {
                CellResult failed;
                failed.repeat = r;
                failed.representation = rep;
                failed.method = m;
                failed.error = "representation unavailable";
                out.cells.push_back(failed);
                continue;
            }
            log("fitting " + std::string(to_string(m)) + " on " + std::string(to_string(rep)));
            auto fitted = detail::run_cell(it->second.first, train, it->second.second, test, rep, m, o,
                                           repeat_seed(o.split.seed, r, 3));
            fitted.cell.repeat = r;
            if (m == Method::svm && fitted.cell.ok) svm_predictions[rep] = std::move(fitted.predictions);
            out.cells.push_back(std::move(fitted.cell));
        }
    }

    if (o.interpretability && reps.count(Representation::x_tilde)) {
        if (svm_predictions.count(Representation::x) && svm_predictions.count(Representation::x_tilde)) {
            out.interpretability =
                interpretability_report(test.x, reps[Representation::x_tilde].second, svm_predictions[Representation::x],
                                        svm_predictions[Representation::x_tilde], test.y, test.schema);
        } else {
            out.errors.push_back("interpretability: SVM predictions on x and x_tilde are required");
        }
    }
    return out;
}

inline std::vector<Aggregate> aggregate(const std::vector<RepeatResult>& repeats, const BenchmarkOptions& o) {
    std::vector<Aggregate> out;
    for (Representation rep : o.representations) {
        for (Method m : o.methods) {
            Aggregate a;
            a.representation = rep;
            a.method = m;
            std::vector<double> acc, gap;
            for (const auto& r : repeats) {
                for (const auto& c : r.cells) {
                    if (c.representation != rep || c.method != m) continue;
                    if (c.ok) {
                        acc.push_back(c.accuracy);
                        gap.push_back(c.eq_opp);
                    } else {
                        ++a.n_failed;
                    }
                }
            }
            a.n_ok = acc.size();
            std::tie(a.accuracy_mean, a.accuracy_std) = mean_std(acc);
            std::tie(a.eq_opp_mean, a.eq_opp_std) = mean_std(gap);
            out.push_back(a);
        }
    }
    return out;
}

// Repeats run as independent jobs keyed by (master seed, repeat index); the
// report depends only on the data and options, not on thread scheduling.
inline EvalReport run_benchmark(const BenchmarkData& data, const BenchmarkOptions& o) {
    if (o.split.repeats == 0) throw InvalidArgument("benchmark needs at least one repeat");
    if (o.methods.empty() || o.representations.empty()) throw InvalidArgument("benchmark has no cells to run");
    EvalReport report;
    report.repeats.resize(o.split.repeats);
    const std::size_t threads = std::max<std::size_t>(1, std::min(o.threads, o.split.repeats));
    if (threads == 1) {
        for (std::size_t r = 0; r < o.split.repeats; ++r) report.repeats[r] = run_repeat(data, o, r);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t r = t; r < o.split.repeats; r += threads) report.repeats[r] = run_repeat(data, o, r);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    report.aggregates = aggregate(report.repeats, o);
    return report;
}

inline EvalReport run_benchmark(const data::TabularDataset& dataset, const BenchmarkOptions& o) {
    BenchmarkData d;
    d.prepared = dataset;
    return run_benchmark(d, o);
}

} // namespace fairhsic::eval
