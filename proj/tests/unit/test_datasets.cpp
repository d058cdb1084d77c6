#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fairhsic/baselines/cross_validation.hpp"
#include "fairhsic/core/io.hpp"
#include "fairhsic/data/preprocess.hpp"
#include "fairhsic/data/split.hpp"
#include "fairhsic/data/synthetic.hpp"
#include "fairhsic/data/translated_io.hpp"

using namespace fairhsic;
using namespace fairhsic::data;
namespace fs = std::filesystem;

namespace {

const fs::path adult_dir{FAIRHSIC_TEST_DATA_DIR};

bool have_adult() { return fs::exists(adult_dir / "adult.data") && fs::exists(adult_dir / "adult.test"); }

const RawTable& adult() {
    static const RawTable t = load_adult({(adult_dir / "adult.data").string(), (adult_dir / "adult.test").string()});
    return t;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fairhsic_datasets_test";
    fs::create_directories(dir);
    return dir / name;
}

const char* good_row = "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, Not-in-family, White, Male, "
                       "2174, 0, 40, United-States, <=50K";

// TPR(group 1) - TPR(group 0) in absolute value, counted directly.
double tpr_gap(const std::vector<int>& pred, const std::vector<int>& y, const std::vector<int>& s) {
    double tp[2] = {0, 0}, pos[2] = {0, 0};
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        pos[s[i]] += 1;
        tp[s[i]] += pred[i] == 1;
    }
    return std::abs(tp[1] / pos[1] - tp[0] / pos[0]);
}

double held_out_lr_gap(double proxy_strength, std::uint64_t seed) {
    SyntheticOptions o;
    o.proxy_strength = proxy_strength;
    const RawTable t = synthesize_biased_records(5000, seed, o);
    const auto idx = split_indices(t.size(), SplitSpec::proportional(t.size(), 0.7, seed, 1), 0);
    const FeatureSchema schema = fit_schema(t, synthetic_preprocess_options(), idx.train);
    const TabularDataset train = transform(t, schema, idx.train), test = transform(t, schema, idx.test);
    const auto cv = baselines::cross_validate(train.x, train.y, baselines::LinearKind::logistic, {});
    const auto m = baselines::fit_linear(train.x, train.y, baselines::LinearKind::logistic, cv.best_c);
    return tpr_gap(m.predict(test.x), test.y, test.s);
}

} // namespace

TEST(LoadAdult, CanonicalFilesGive45222Records) {
    if (!have_adult()) GTEST_SKIP() << "Adult files not found in " << adult_dir;
    AdultLoadStats stats;
    const RawTable t = load_adult({(adult_dir / "adult.data").string(), (adult_dir / "adult.test").string()}, &stats);
    EXPECT_EQ(t.size(), 45222u);
    EXPECT_EQ(stats.lines_read - stats.dropped_missing, 45222u);
    const std::size_t income = t.column_index("income");
    for (const auto& r : t.rows) EXPECT_TRUE(r[income] == ">50K" || r[income] == "<=50K");
}

TEST(LoadAdult, DropsMissingAndNormalisesTestLabels) {
    const fs::path p = scratch("tiny.test");
    write_file(p, std::string("|1x3 Cross validator\n") + good_row + "\n" +
                      "50, ?, 83311, Bachelors, 13, Married-civ-spouse, Exec-managerial, Husband, White, Male, 0, 0, "
                      "13, United-States, <=50K\n" +
                      "38, Private, 215646, HS-grad, 9, Divorced, Handlers-cleaners, Not-in-family, White, Male, 0, 0, "
                      "40, United-States, >50K.\n\n");
    AdultLoadStats stats;
    const RawTable t = load_adult(p.string(), &stats);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(stats.dropped_missing, 1u);
    EXPECT_EQ(t.rows[1][t.column_index("income")], ">50K");
    EXPECT_EQ(t.rows[0][t.column_index("workclass")], "State-gov");
}

TEST(LoadAdult, MalformedRowReportsLineNumber) {
    const fs::path p = scratch("bad.data");
    write_file(p, std::string(good_row) + "\n" + "1, 2, 3\n");
    try {
        load_adult(p.string());
        FAIL() << "expected a data error";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_adult((adult_dir / "does-not-exist").string()), IoError);
}

TEST(Preprocess, ZScoresAndOneHotBlocks) {
    if (!have_adult()) GTEST_SKIP() << "Adult files not found";
    const TabularDataset d = preprocess(adult());
    d.validate();
    EXPECT_EQ(d.size(), 45222u);
    EXPECT_EQ(d.schema.protected_groups, (std::vector<std::string>{"Female", "Male"}));
    for (const auto& b : d.schema.blocks()) {
        if (!b.categorical) {
            double mean = 0, ss = 0;
            for (std::size_t i = 0; i < d.size(); ++i) mean += d.x(i, b.offset);
            mean /= static_cast<double>(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) ss += std::pow(d.x(i, b.offset) - mean, 2);
            EXPECT_NEAR(mean, 0.0, 1e-9) << b.name;
            EXPECT_NEAR(std::sqrt(ss / static_cast<double>(d.size())), 1.0, 1e-9) << b.name;
        }
    }
    const FeatureBlock rel = d.schema.block("relationship");
    EXPECT_EQ(rel.width, 6u);
    for (std::size_t i = 0; i < d.size(); ++i) {
        double sum = 0;
        for (std::size_t j = 0; j < rel.width; ++j) sum += d.x(i, rel.offset + j);
        ASSERT_EQ(sum, 1.0);
    }
    const auto names = d.schema.feature_names();
    EXPECT_EQ(std::count_if(names.begin(), names.end(), [](const std::string& n) { return n.rfind("sex", 0) == 0; }), 0);
    EXPECT_EQ(std::count_if(names.begin(), names.end(), [](const std::string& n) { return n.rfind("income", 0) == 0; }),
              0);
}

TEST(Preprocess, BlocksTileFeatureRangeAndSchemaRoundTrips) {
    const TabularDataset d = synthesize_biased(400, 1);
    std::size_t next = 0;
    for (const auto& b : d.schema.blocks()) {
        EXPECT_EQ(b.offset, next);
        next += b.width;
    }
    EXPECT_EQ(next, d.dim());
    const nlohmann::json j = d.schema;
    EXPECT_EQ(j.get<FeatureSchema>(), d.schema);
    EXPECT_EQ(j.get<FeatureSchema>().hash(), d.schema.hash());
}

TEST(Preprocess, InverseTransformReproducesRawRows) {
    if (!have_adult()) GTEST_SKIP() << "Adult files not found";
    const RawTable& t = adult();
    std::vector<std::size_t> rows(1000);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, t.size() - 1);
    for (auto& r : rows) r = pick(rng);
    const FeatureSchema schema = fit_schema(t, {});
    const TabularDataset d = transform(t, schema, rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto back = inverse_transform_row(d.x.row_span(i), schema);
        for (std::size_t k = 0; k < schema.columns.size(); ++k) {
            const std::string& raw = t.rows[rows[i]][t.column_index(column_name(schema.columns[k]))];
            if (std::holds_alternative<CategoricalColumn>(schema.columns[k])) {
                ASSERT_EQ(back[k], raw);
            } else {
                ASSERT_NEAR(parse_double(back[k]), parse_double(raw), 1e-9);
            }
        }
    }
}

TEST(Preprocess, StatisticsComeFromFittingRowsOnly) {
    const RawTable t = synthesize_biased_records(2000, 3);
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < t.size(); ++i) (parse_double(t.rows[i][0]) < 0.3 ? train : test).push_back(i);
    const FeatureSchema schema = fit_schema(t, synthetic_preprocess_options(), train);
    const TabularDataset te = transform(t, schema, test);
    double mean = 0;
    for (std::size_t i = 0; i < te.size(); ++i) mean += te.x(i, schema.block("c1").offset);
    EXPECT_GT(mean / static_cast<double>(te.size()), 0.5);
}

TEST(Preprocess, UnseenCategoryLeavesBlockEmptyAndIsCounted) {
    RawTable t = synthesize_biased_records(200, 4);
    const FeatureSchema schema = fit_schema(t, synthetic_preprocess_options());
    t.rows[0][t.column_index("role")] = "cousin";
    TransformStats stats;
    const TabularDataset d = transform(t, schema, &stats);
    EXPECT_EQ(stats.unknown_categories.at("role"), 1u);
    const FeatureBlock b = schema.block("role");
    for (std::size_t j = 0; j < b.width; ++j) EXPECT_EQ(d.x(0, b.offset + j), 0.0);
    EXPECT_EQ(inverse_transform_row(d.x.row_span(0), schema)[schema.columns.size() - 1], unknown_category);
}

TEST(Preprocess, EmptyInputIsAnError) {
    const RawTable t{synthetic_columns(), {}};
    EXPECT_THROW(fit_schema(t, synthetic_preprocess_options()), DataError);
}

TEST(Split, DeterministicKeyedDisjointAndSized) {
    const SplitSpec spec{700, 250, 9, 10};
    const auto a = split_indices(1000, spec, 0), b = split_indices(1000, spec, 0), c = split_indices(1000, spec, 1);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_NE(a.train, c.train);
    EXPECT_EQ(a.train.size(), 700u);
    EXPECT_EQ(a.test.size(), 250u);
    std::set<std::size_t> all(a.train.begin(), a.train.end());
    all.insert(a.test.begin(), a.test.end());
    EXPECT_EQ(all.size(), 950u);
    EXPECT_THROW(split_indices(900, spec, 0), InvalidArgument);
    const TabularDataset d = synthesize_biased(1000, 2);
    const auto [train, test] = split(d, spec, 3);
    EXPECT_EQ(train.size(), 700u);
    EXPECT_EQ(test.size(), 250u);
}

TEST(Split, DefaultSpecMatchesAdultSizes) {
    const SplitSpec spec;
    EXPECT_EQ(spec.train_n, 28222u);
    EXPECT_EQ(spec.test_n, 15000u);
    EXPECT_EQ(spec.repeats, 10u);
}

TEST(Synthetic, FixedSeedIsDeterministicAndHasFourRoles) {
    EXPECT_EQ(synthesize_biased_records(500, 7).rows, synthesize_biased_records(500, 7).rows);
    EXPECT_NE(synthesize_biased_records(500, 7).rows, synthesize_biased_records(500, 8).rows);
    const TabularDataset d = synthesize_biased(500, 7);
    EXPECT_EQ(d.schema.block("role").width, 4u);
    EXPECT_EQ(d.dim(), 6u);
    EXPECT_EQ(fair_labels(synthesize_biased_records(500, 7)).size(), 500u);
    EXPECT_THROW(synthesize_biased(99, 1), InvalidArgument);
}

TEST(Synthetic, NoProxyMeansNoGap) {
    EXPECT_LT(held_out_lr_gap(0.0, 11), 0.03);
}

TEST(Synthetic, FullProxyMeansLargeGap) {
    EXPECT_GT(held_out_lr_gap(1.0, 11), 0.2);
}

TEST(TranslatedIo, RoundTripIsBitExact) {
    TabularDataset d = synthesize_biased(300, 5);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> normal(0.0, 1.0);
    diff::Matrix xt(d.size(), d.dim());
    for (double& v : xt.data()) v = normal(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    xt(0, 0) = -0.0;
    xt(1, 0) = 5e-324;
    xt(2, 0) = 1.7976931348623157e308;
    const fs::path p = scratch("translated.tsv");
    write_translated(p, d, xt, {{"model_hash", "abc"}, {"seed", 3}});
    const DatasetFile back = read_translated(p, {d.schema.hash(), "abc"});
    EXPECT_EQ(back.dataset.x.data(), xt.data());
    for (std::size_t k = 0; k < xt.size(); ++k)
        ASSERT_EQ(std::signbit(back.dataset.x.data()[k]), std::signbit(xt.data()[k]));
    EXPECT_EQ(back.dataset.s, d.s);
    EXPECT_EQ(back.dataset.y, d.y);
    EXPECT_EQ(back.dataset.schema, d.schema);
    EXPECT_EQ(back.provenance.at("seed"), 3);
    write_dataset(scratch("again.tsv"), back.dataset, back.provenance);
    EXPECT_EQ(read_file(scratch("again.tsv")), read_file(p));
}

TEST(TranslatedIo, ProvenanceAndSchemaMismatchesAreRefused) {
    const TabularDataset d = synthesize_biased(200, 5);
    const fs::path p = scratch("prov.tsv");
    write_translated(p, d, d.x, {{"model_hash", "abc"}});
    EXPECT_THROW(read_translated(p, {std::nullopt, std::string("other")}), ProvenanceError);
    EXPECT_THROW(read_translated(p, {std::string("0000"), std::nullopt}), ProvenanceError);
    std::string text = read_file(p);
    const auto pos = text.find("\"c1\"");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 4, "\"c9\"");
    write_file(p, text);
    EXPECT_THROW(read_translated(p), ProvenanceError);
    EXPECT_THROW(write_translated(p, d, diff::Matrix(3, 3), {}), ShapeError);
}

TEST(TranslatedIo, EmptyDatasetWritesHeaderOnly) {
    const TabularDataset full = synthesize_biased(200, 5);
    const TabularDataset empty = full.subset(std::vector<std::size_t>{});
    const fs::path p = scratch("empty.tsv");
    write_dataset(p, empty);
    const std::string text = read_file(p);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    const DatasetFile back = read_dataset(p);
    EXPECT_EQ(back.dataset.size(), 0u);
    EXPECT_EQ(back.dataset.dim(), full.dim());
    write_file(p, "");
    EXPECT_THROW(read_dataset(p), DataError);
}
