#pragma once

#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairhsic/core/error.hpp"
#include "fairhsic/core/io.hpp"
#include "fairhsic/data/dataset.hpp"
#include "fairhsic/data/table.hpp"

namespace fairhsic::data {

// Columnar text format for (possibly translated) datasets:
//   line 1: JSON header {format, version, n, d, schema, schema_hash, provenance}
//   line 2: tab-separated column names: row_id, s, y, then one per feature
//   then one tab-separated row per record, reals with 17 significant digits.
inline constexpr const char* dataset_format = "fairhsic-dataset";
inline constexpr int dataset_format_version = 1;

struct DatasetFile {
    TabularDataset dataset;
    nlohmann::json provenance = nlohmann::json::object();
};

inline std::string render_dataset(const TabularDataset& d, const nlohmann::json& provenance) {
    d.validate();
    nlohmann::json header{{"format", dataset_format},
                          {"version", dataset_format_version},
                          {"n", d.size()},
                          {"d", d.dim()},
                          {"schema", d.schema},
                          {"schema_hash", d.schema.hash()},
                          {"provenance", provenance}};
    std::ostringstream out;
    out << header.dump() << '\n' << "row_id\ts\ty";
    const auto names = d.schema.columns.empty() ? std::vector<std::string>{} : d.schema.feature_names();
    for (std::size_t c = 0; c < d.dim(); ++c) out << '\t' << (names.empty() ? "x" + std::to_string(c) : names[c]);
    out << '\n';
    for (std::size_t r = 0; r < d.size(); ++r) {
        out << r << '\t' << d.s[r] << '\t' << d.y[r];
        for (double v : d.x.row_span(r)) out << '\t' << format_double(v);
        out << '\n';
    }
    return out.str();
}

inline void write_dataset(const std::filesystem::path& path, const TabularDataset& d,
                          const nlohmann::json& provenance = nlohmann::json::object()) {
    write_file(path, render_dataset(d, provenance));
}

// Persists `x_tilde` in place of the dataset's features.
inline void write_translated(const std::filesystem::path& path, const TabularDataset& dataset, const Matrix& x_tilde,
                             const nlohmann::json& provenance) {
    if (x_tilde.rows() != dataset.size() || x_tilde.cols() != dataset.dim()) {
        throw ShapeError("translated features are " + x_tilde.shape_string() + ", dataset is " +
                         std::to_string(dataset.size()) + "x" + std::to_string(dataset.dim()));
    }
    write_dataset(path, dataset.with_features(x_tilde), provenance);
}

struct ReadExpectations {
    std::optional<std::string> schema_hash;
    std::optional<std::string> model_hash;
};

inline DatasetFile parse_dataset(const std::string& text, const std::string& origin,
                                 const ReadExpectations& expect = {}) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError(origin + ": empty dataset file");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(origin + ": header is not valid JSON: " + e.what());
    }
    if (header.value("format", "") != dataset_format) throw DataError(origin + ": not a dataset file");
    if (header.at("version").get<int>() != dataset_format_version) {
        throw DataError(origin + ": unsupported dataset version " + header.at("version").dump());
    }
    DatasetFile out;
    out.dataset.schema = header.at("schema").get<FeatureSchema>();
    out.provenance = header.at("provenance");
    const auto recorded = header.at("schema_hash").get<std::string>();
    if (recorded != out.dataset.schema.hash()) {
        throw ProvenanceError(origin + ": schema does not match its recorded hash");
    }
    if (expect.schema_hash && *expect.schema_hash != recorded) {
        throw ProvenanceError(origin + ": schema hash " + recorded + " differs from expected " + *expect.schema_hash);
    }
    if (expect.model_hash) {
        const auto model = out.provenance.value("model_hash", std::string{});
        if (model != *expect.model_hash) {
            throw ProvenanceError(origin + ": produced by model '" + model + "', expected '" + *expect.model_hash +
                                  "'");
        }
    }
    const auto n = header.at("n").get<std::size_t>();
    const auto d = header.at("d").get<std::size_t>();
    if (!std::getline(in, line)) throw DataError(origin + ": missing column header line");
    if (split_fields(line, '\t').size() != d + 3) throw DataError(origin + ": column header has the wrong width");
    out.dataset.x = Matrix(n, d);
    out.dataset.s.resize(n);
    out.dataset.y.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (!std::getline(in, line)) throw DataError(origin + ": expected " + std::to_string(n) + " rows, found " +
                                                     std::to_string(r));
        const auto f = split_fields(line, '\t');
        const std::string where = origin + " line " + std::to_string(r + 3);
        if (f.size() != d + 3) throw DataError(where + ": expected " + std::to_string(d + 3) + " fields");
        out.dataset.s[r] = static_cast<int>(parse_double(f[1], where));
        out.dataset.y[r] = static_cast<int>(parse_double(f[2], where));
        for (std::size_t c = 0; c < d; ++c) out.dataset.x(r, c) = parse_double(f[c + 3], where);
    }
    while (std::getline(in, line)) {
        if (!trim(line).empty()) throw DataError(origin + ": trailing data after " + std::to_string(n) + " rows");
    }
    out.dataset.validate();
    return out;
}

inline DatasetFile read_dataset(const std::filesystem::path& path, const ReadExpectations& expect = {}) {
    return parse_dataset(read_file(path), path.string(), expect);
}

inline DatasetFile read_translated(const std::filesystem::path& path, const ReadExpectations& expect = {}) {
    return read_dataset(path, expect);
}

} // namespace fairhsic::data
