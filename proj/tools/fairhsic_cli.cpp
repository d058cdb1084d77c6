#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairhsic/cli/commands.hpp"

namespace {

using fairhsic::cli::RunConfig;
namespace fs = std::filesystem;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> repeats;
    bool synthetic = false;
    bool fast = false;
    std::string out = ".";
    std::optional<std::string> data_dir;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON run configuration (unknown keys are rejected)");
    cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
    cmd->add_option("--repeats", f.repeats, "number of repeated splits (overrides the config)");
    cmd->add_flag("--synthetic", f.synthetic, "use the built-in biased generator instead of the Adult files");
    cmd->add_flag("--fast", f.fast, "10,000 training iterations instead of the configured count");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--data-dir", f.data_dir, "directory holding the Adult files (default: $FAIRHSIC_DATA_DIR)");
}

RunConfig resolve(const CommonFlags& f) {
    RunConfig c;
    if (!f.config_path.empty()) c = fairhsic::cli::parse_run_config_text(fairhsic::read_file(f.config_path));
    if (f.seed) c.seed = *f.seed;
    if (f.repeats) c.split.repeats = *f.repeats;
    if (f.fast) c.apply_fast_profile();
    return c;
}

std::optional<fs::path> data_dir(const CommonFlags& f) {
    if (f.data_dir) return fs::path(*f.data_dir);
    return std::nullopt;
}

int fail(const std::string& command, const std::string& kind, const std::string& message, int code) {
    std::cerr << nlohmann::json{{"error", {{"command", command}, {"kind", kind}, {"message", message}}}}.dump()
              << std::endl;
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair data translation with HSIC residual decomposition"};
    app.require_subcommand(1);
    CommonFlags flags;
    std::string data_path, model_path, x_path, x_tilde_path;
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "progress messages on stderr");

    auto* prepare = app.add_subcommand("prepare", "load and preprocess the Adult files (or --synthetic data)");
    add_common(prepare, flags);
    auto* train = app.add_subcommand("train", "train the translation network on a prepared dataset");
    add_common(train, flags);
    train->add_option("--data", data_path, "prepared dataset file")->required();
    auto* translate = app.add_subcommand("translate", "translate a dataset file with a trained model");
    add_common(translate, flags);
    translate->add_option("--model", model_path, "model file written by train")->required();
    translate->add_option("--data", data_path, "prepared dataset file")->required();
    auto* benchmark = app.add_subcommand("benchmark", "repeated-split benchmark of all methods and representations");
    add_common(benchmark, flags);
    auto* report = app.add_subcommand("report", "interpretability report from x and translated x files");
    add_common(report, flags);
    report->add_option("--x", x_path, "dataset file with the original rows")->required();
    report->add_option("--x-tilde", x_tilde_path, "translated dataset file with the same rows")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("", "usage", e.what(), 64);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const RunConfig config = resolve(flags);
        const fs::path out(flags.out);
        fairhsic::cli::CommandResult result;
        if (command == "prepare") {
            result = fairhsic::cli::cmd_prepare(config, flags.synthetic, data_dir(flags), out);
        } else if (command == "train") {
            result = fairhsic::cli::cmd_train(config, data_path, out);
        } else if (command == "translate") {
            std::optional<RunConfig> expected;
            if (!flags.config_path.empty() || flags.seed || flags.fast || flags.repeats) expected = config;
            result = fairhsic::cli::cmd_translate(expected, model_path, data_path, out);
        } else if (command == "benchmark") {
            auto log = [&](const std::string& m) {
                if (verbose) std::cerr << m << std::endl;
            };
            result = fairhsic::cli::cmd_benchmark(config, flags.synthetic, data_dir(flags), out, log);
        } else {
            result = fairhsic::cli::cmd_report(config, x_path, x_tilde_path, out);
        }
        std::cout << result.summary.dump() << std::endl;
        return 0;
    } catch (const fairhsic::Error& e) {
        return fail(command, e.kind(), e.what(), 1);
    } catch (const nlohmann::json::exception& e) {
        return fail(command, "invalid_argument", e.what(), 1);
    } catch (const std::exception& e) {
        return fail(command, "internal", e.what(), 1);
    }
}
