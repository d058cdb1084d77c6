#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairhsic/baselines/cross_validation.hpp"
#include "fairhsic/cli/run_config.hpp"
#include "fairhsic/core/io.hpp"
#include "fairhsic/data/preprocess.hpp"
#include "fairhsic/data/synthetic.hpp"
#include "fairhsic/data/table.hpp"
#include "fairhsic/data/translated_io.hpp"
#include "fairhsic/eval/interpretability.hpp"
#include "fairhsic/eval/report_io.hpp"
#include "fairhsic/translator/model_io.hpp"
#include "fairhsic/translator/train.hpp"

namespace fairhsic::cli {

namespace fs = std::filesystem;

inline constexpr const char* data_dir_env = "FAIRHSIC_DATA_DIR";

// Fingerprint embedded in every output file.
inline nlohmann::json run_context(const RunConfig& c, const std::string& command) {
    return {{"command", command}, {"config_hash", config_hash(c)}, {"seed", c.seed}};
}

inline fs::path resolve_data_dir(const std::optional<fs::path>& explicit_dir) {
    if (explicit_dir) return *explicit_dir;
    if (const char* env = std::getenv(data_dir_env); env && *env) return fs::path(env);
    throw InvalidArgument(std::string("no data directory: pass --data-dir or set ") + data_dir_env);
}

inline data::RawTable load_adult_files(const RunConfig& c, const fs::path& dir, nlohmann::json* sources = nullptr) {
    std::vector<std::string> paths;
    for (const auto& f : c.adult_files) {
        const fs::path p = dir / f;
        if (!fs::exists(p)) throw IoError("missing input file '" + p.string() + "'");
        paths.push_back(p.string());
        if (sources) sources->push_back({{"file", f}, {"sha256", file_sha256(p)}});
    }
    return data::load_adult(paths);
}

inline data::PreprocessOptions adult_preprocess_options(const RunConfig& c) {
    data::PreprocessOptions o;
    o.protected_column = c.protected_column;
    return o;
}

struct CommandResult {
    nlohmann::json summary;  // printed to stdout as one JSON line
};

// load_adult + preprocess (or generate synthetic data) and persist.
inline CommandResult cmd_prepare(const RunConfig& c, bool synthetic, const std::optional<fs::path>& data_dir,
                                 const fs::path& out_dir) {
    nlohmann::json prov = run_context(c, "prepare");
    data::TabularDataset d;
    if (synthetic) {
        d = data::preprocess(data::synthesize_biased_records(c.synthetic.n, c.seed, c.synthetic.generator),
                             data::synthetic_preprocess_options());
        prov["source"] = "synthetic";
    } else {
        nlohmann::json sources = nlohmann::json::array();
        d = data::preprocess(load_adult_files(c, resolve_data_dir(data_dir), &sources), adult_preprocess_options(c));
        prov["source"] = sources;
    }
    const fs::path out = out_dir / "dataset.tsv";
    data::write_dataset(out, d, prov);
    return {{{"command", "prepare"},
             {"output", out.string()},
             {"n", d.size()},
             {"d", d.dim()},
             {"schema_hash", d.schema.hash()},
             {"config_hash", prov["config_hash"]}}};
}

inline std::string history_csv(const translator::TrainResult& r, const std::string& hash, std::uint64_t seed) {
    std::ostringstream out;
    out << "config_hash,seed,iteration,prediction,reconstruction,decomposition,total,positives,decomposition_skipped\n";
    for (const auto& h : r.history) {
        out << hash << ',' << seed << ',' << h.iteration << ',' << data::format_double(h.loss.prediction) << ','
            << data::format_double(h.loss.reconstruction) << ',' << data::format_double(h.loss.decomposition) << ','
            << data::format_double(h.loss.total) << ',' << h.positives << ','
            << (h.decomposition_skipped ? "true" : "false") << '\n';
    }
    return out.str();
}

// Trains the transformer on every row of a prepared dataset file.
inline CommandResult cmd_train(const RunConfig& c, const fs::path& data_path, const fs::path& out_dir) {
    const auto file = data::read_dataset(data_path);
    translator::TransformerConfig tc = c.transformer;
    tc.seed = c.seed;
    tc.input_dim = 0;
    const auto result = translator::train(file.dataset, tc);
    auto model = translator::TranslatorModel::from_training(result, file.dataset.schema);
    model.provenance = run_context(c, "train");
    model.provenance["data_sha256"] = file_sha256(data_path);
    const fs::path model_path = out_dir / "model.json";
    const std::string model_hash = translator::write_model(model_path, model);
    const fs::path history_path = out_dir / "loss_history.csv";
    write_file(history_path, history_csv(result, config_hash(c), c.seed));
    return {{{"command", "train"},
             {"model", model_path.string()},
             {"model_hash", model_hash},
             {"history", history_path.string()},
             {"skipped_steps", result.skipped_steps},
             {"config_hash", config_hash(c)}}};
}

inline CommandResult cmd_translate(const std::optional<RunConfig>& c, const fs::path& model_path,
                                   const fs::path& data_path, const fs::path& out_dir) {
    const auto model = translator::read_model(model_path);
    const std::string model_hash = file_sha256(model_path);
    const std::string model_config = model.provenance.value("config_hash", std::string{});
    if (c && config_hash(*c) != model_config) {
        throw ProvenanceError("config hash " + config_hash(*c) + " differs from the model's " + model_config);
    }
    data::ReadExpectations expect;
    if (model.schema) expect.schema_hash = model.schema->hash();
    const auto file = data::read_dataset(data_path, expect);
    const diff::Matrix x_tilde = translator::translate(model.params, file.dataset.x);
    nlohmann::json prov{{"command", "translate"},
                        {"model_hash", model_hash},
                        {"config_hash", model_config},
                        {"seed", model.provenance.value("seed", std::uint64_t{0})},
                        {"data_sha256", file_sha256(data_path)}};
    const fs::path out = out_dir / "translated.tsv";
    data::write_translated(out, file.dataset, x_tilde, prov);
    return {{{"command", "translate"}, {"output", out.string()}, {"n", file.dataset.size()}, {"model_hash", model_hash}}};
}

inline eval::BenchmarkData benchmark_data(const RunConfig& c, bool synthetic, const std::optional<fs::path>& data_dir,
                                          nlohmann::json& context) {
    eval::BenchmarkData d;
    if (synthetic) {
        d.raw = data::synthesize_biased_records(c.synthetic.n, c.seed, c.synthetic.generator);
        d.preprocess = data::synthetic_preprocess_options();
        context["source"] = "synthetic";
    } else {
        nlohmann::json sources = nlohmann::json::array();
        d.raw = load_adult_files(c, resolve_data_dir(data_dir), &sources);
        d.preprocess = adult_preprocess_options(c);
        context["source"] = sources;
    }
    return d;
}

inline std::string all_interpretability_csv(const eval::EvalReport& r, const RunConfig& c) {
    const std::string columns = "config_hash,seed,repeat,";
    const std::string fingerprint = config_hash(c) + "," + std::to_string(c.seed) + ",";
    std::string out;
    bool header = true;
    for (const auto& rep : r.repeats) {
        if (!rep.interpretability) continue;
        std::string csv =
            eval::interpretability_csv(*rep.interpretability, columns, fingerprint + std::to_string(rep.repeat) + ",");
        if (!header) csv.erase(0, csv.find('\n') + 1);
        header = false;
        out += csv;
    }
    if (header) out = eval::interpretability_csv({}, columns, "");
    return out;
}

// run_benchmark end to end; writes report.json, report.csv, interpretability.csv.
inline CommandResult cmd_benchmark(const RunConfig& c, bool synthetic, const std::optional<fs::path>& data_dir,
                                   const fs::path& out_dir, const std::function<void(const std::string&)>& log = {}) {
    nlohmann::json context = run_context(c, "benchmark");
    const auto data = benchmark_data(c, synthetic, data_dir, context);
    auto options = benchmark_options(c, synthetic);
    options.log = log;
    const auto report = eval::run_benchmark(data, options);
    write_file(out_dir / "report.json", eval::report_json(report, context).dump(1) + "\n");
    write_file(out_dir / "report.csv", eval::report_csv(report, config_hash(c), c.seed));
    write_file(out_dir / "interpretability.csv", all_interpretability_csv(report, c));
    nlohmann::json table = nlohmann::json::array();
    for (const auto& a : report.aggregates) {
        table.push_back({{"representation", eval::to_string(a.representation)},
                         {"method", eval::to_string(a.method)},
                         {"accuracy_mean", a.accuracy_mean},
                         {"eq_opp_mean", a.eq_opp_mean},
                         {"n_ok", a.n_ok}});
    }
    return {{{"command", "benchmark"}, {"output", out_dir.string()}, {"aggregates", table}, {"config_hash", config_hash(c)}}};
}

// Interpretability report for two files holding the same rows as x and x~.
// An SVM (C chosen by cross-validation) is fit on each representation and its
// in-sample predictions define the focus subset.
inline CommandResult cmd_report(const RunConfig& c, const fs::path& x_path, const fs::path& x_tilde_path,
                                const fs::path& out_dir) {
    const auto x = data::read_dataset(x_path);
    const auto xt = data::read_dataset(x_tilde_path, {x.dataset.schema.hash(), std::nullopt});
    if (x.dataset.size() != xt.dataset.size() || x.dataset.y != xt.dataset.y || x.dataset.s != xt.dataset.s) {
        throw DataError("x and x~ files do not describe the same rows");
    }
    auto predictions = [&](const data::TabularDataset& d) {
        baselines::CvPlan plan = c.cv;
        plan.seed = c.seed;
        const auto cv = baselines::cross_validate(d.x, d.y, baselines::LinearKind::svm, plan);
        return baselines::fit_linear(d.x, d.y, baselines::LinearKind::svm, cv.best_c).predict(d.x);
    };
    const auto delta = eval::interpretability_report(x.dataset.x, xt.dataset.x, predictions(x.dataset),
                                                     predictions(xt.dataset), x.dataset.y, x.dataset.schema);
    nlohmann::json context = run_context(c, "report");
    context["x_sha256"] = file_sha256(x_path);
    context["x_tilde_sha256"] = file_sha256(x_tilde_path);
    write_file(out_dir / "interpretability.csv",
               eval::interpretability_csv(delta, "config_hash,seed,", config_hash(c) + "," + std::to_string(c.seed) + ","));
    write_file(out_dir / "interpretability.json",
               nlohmann::json{{"context", context}, {"report", eval::interpretability_json(delta)}}.dump(1) + "\n");
    nlohmann::json ranking = nlohmann::json::array();
    for (const auto& f : delta.features) ranking.push_back({{"feature", f.feature}, {"changed_rows", f.changed_rows}});
    return {{{"command", "report"}, {"focus_size", delta.focus_size}, {"ranking", ranking}}};
}

} // namespace fairhsic::cli
