#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fairhsic/core/error.hpp"
#include "fairhsic/core/io.hpp"
#include "fairhsic/data/schema.hpp"
#include "fairhsic/translator/train.hpp"

namespace fairhsic::translator {

inline constexpr const char* model_format = "fairhsic-translator";
inline constexpr int model_version = 1;

// Everything needed to translate new rows in a later process.
struct TranslatorModel {
    TransformerConfig config;
    TransformerParams params;
    DecompositionKernels kernels;
    std::optional<data::FeatureSchema> schema;
    nlohmann::json provenance = nlohmann::json::object();

    static TranslatorModel from_training(const TrainResult& r, std::optional<data::FeatureSchema> schema = {}) {
        return TranslatorModel{r.config, r.params, r.kernels, std::move(schema), nlohmann::json::object()};
    }
};

inline nlohmann::json matrix_to_json(const Matrix& m) {
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

inline std::filesystem::path rff_sidecar_path(const std::filesystem::path& model_path) {
    return std::filesystem::path(model_path.string() + ".rff.json");
}

// Writes the model file and its RFF sidecar; returns the model file SHA-256.
inline std::string write_model(const std::filesystem::path& path, const TranslatorModel& m) {
    const std::string sidecar = nlohmann::json(m.kernels.phi).dump() + "\n";
    const auto sidecar_path = rff_sidecar_path(path);
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, value] : m.params.values) params[name] = matrix_to_json(value);
    nlohmann::json j{{"format", model_format},
                     {"version", model_version},
                     {"config", m.config},
                     {"params", params},
                     {"feature_gamma", m.kernels.feature_gamma},
                     {"protected_gamma", m.kernels.protected_gamma},
                     {"hsic_estimator", std::string(kernels::to_string(m.kernels.estimator))},
                     {"rff_sidecar", sidecar_path.filename().string()},
                     {"rff_sha256", sha256_hex(sidecar)},
                     {"provenance", m.provenance}};
    j["schema"] = m.schema ? nlohmann::json(*m.schema) : nlohmann::json(nullptr);
    const std::string text = j.dump(1) + "\n";
    write_file(sidecar_path, sidecar);
    write_file(path, text);
    return sha256_hex(text);
}

inline TranslatorModel read_model(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (j.value("format", "") != model_format) throw DataError("'" + path.string() + "' is not a translator model");
    if (j.at("version").get<int>() != model_version) {
        throw DataError("unsupported model version " + j.at("version").dump());
    }
    const auto sidecar_path = path.parent_path() / j.at("rff_sidecar").get<std::string>();
    const std::string sidecar = read_file(sidecar_path);
    if (sha256_hex(sidecar) != j.at("rff_sha256").get<std::string>()) {
        throw ProvenanceError("RFF sidecar '" + sidecar_path.string() + "' does not match the model's recorded hash");
    }
    TranslatorModel m;
    m.config = j.at("config").get<TransformerConfig>();
    for (const auto& [name, value] : j.at("params").items()) m.params.values[name] = matrix_from_json(value);
    m.kernels.phi = nlohmann::json::parse(sidecar).get<kernels::RffMap>();
    m.kernels.feature_gamma = j.at("feature_gamma").get<double>();
    m.kernels.protected_gamma = j.at("protected_gamma").get<double>();
    m.kernels.estimator = kernels::parse_estimator(j.at("hsic_estimator").get<std::string>());
    if (!j.at("schema").is_null()) m.schema = j.at("schema").get<data::FeatureSchema>();
    m.provenance = j.at("provenance");
    return m;
}

} // namespace fairhsic::translator
