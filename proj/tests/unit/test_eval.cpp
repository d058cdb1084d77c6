#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "fairhsic/data/synthetic.hpp"
#include "fairhsic/eval/benchmark.hpp"
#include "fairhsic/eval/report_io.hpp"

using namespace fairhsic;
using namespace fairhsic::eval;
using diff::Matrix;

namespace {

// Group 0: 10 positives, 9 predicted positive. Group 1: 10 positives, 5 predicted positive.
struct TwentyRows {
    std::vector<int> pred, y, s;
    TwentyRows() {
        for (int g : {0, 1})
            for (int i = 0; i < 10; ++i) {
                y.push_back(1);
                s.push_back(g);
                pred.push_back(i < (g == 0 ? 9 : 5) ? 1 : -1);
            }
    }
};

BenchmarkOptions quick_options(std::size_t n) {
    BenchmarkOptions o;
    o.split = data::SplitSpec::proportional(n, 0.7, 5, 2);
    o.transformer.iterations = 200;
    o.adversarial.iterations = 200;
    o.cv.grid = {1.0, 100.0};
    return o;
}

const data::TabularDataset& small_synthetic() {
    static const data::TabularDataset d = data::synthesize_biased(600, 3);
    return d;
}

const CellResult& cell(const RepeatResult& r, Representation rep, Method m) {
    for (const auto& c : r.cells)
        if (c.representation == rep && c.method == m) return c;
    throw std::runtime_error("cell not found");
}

} // namespace

TEST(Accuracy, Examples) {
    const std::vector<int> y{1, -1, 1, -1};
    EXPECT_EQ(accuracy(y, y), 1.0);
    EXPECT_EQ(accuracy(std::vector<int>{-1, 1, -1, 1}, y), 0.0);
    EXPECT_EQ(accuracy(std::vector<int>{1, -1, 1, 1}, y), 0.75);
    EXPECT_THROW(accuracy(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
    EXPECT_THROW(accuracy(std::vector<int>{1}, y), ShapeError);
}

TEST(Accuracy, ComplementsErrorRateExactly) {
    const std::vector<int> y{1, -1, 1, -1, 1, 1, -1};
    const std::vector<int> p{1, 1, -1, -1, 1, -1, -1};
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < y.size(); ++i) wrong += p[i] != y[i];
    EXPECT_EQ(accuracy(p, y) + static_cast<double>(wrong) / 7.0, 1.0);
}

TEST(EqOpp, ConstructedTwentyRowCase) {
    const TwentyRows t;
    EXPECT_DOUBLE_EQ(eq_opp_gap(t.pred, t.y, t.s), 0.4);
    const GroupRates r = group_rates(t.pred, t.y, t.s);
    EXPECT_EQ(r.at(0).tp, 9u);
    EXPECT_EQ(r.at(0).fn, 1u);
    EXPECT_EQ(r.at(1).tp, 5u);
    EXPECT_EQ(r.at(1).support(), 10u);
    EXPECT_DOUBLE_EQ(r.at(0).tpr(), 0.9);
    EXPECT_DOUBLE_EQ(r.at(1).tpr(), 0.5);
    EXPECT_DOUBLE_EQ(std::abs(r.at(0).tpr() - r.at(1).tpr()), eq_opp_gap(r));
}

TEST(EqOpp, SymmetricUnderGroupRelabelling) {
    TwentyRows t;
    const double gap = eq_opp_gap(t.pred, t.y, t.s);
    for (int& s : t.s) s = 1 - s;
    EXPECT_EQ(eq_opp_gap(t.pred, t.y, t.s), gap);
}

TEST(EqOpp, IdenticalGroupBehaviourGivesZero) {
    std::vector<int> pred, y, s;
    for (int g : {0, 1})
        for (int i = 0; i < 8; ++i) {
            s.push_back(g);
            y.push_back(i % 2 ? 1 : -1);
            pred.push_back(i % 4 == 1 ? -1 : 1);
        }
    EXPECT_EQ(eq_opp_gap(pred, y, s), 0.0);
    const GroupRates r = group_rates(pred, y, s);
    EXPECT_EQ(r.at(0).fpr(), r.at(1).fpr());
    EXPECT_EQ(r.at(0).positive_rate(), r.at(1).positive_rate());
}

TEST(EqOpp, GroupWithoutPositivesIsUndefined) {
    const std::vector<int> pred{1, 1, -1, 1}, y{1, 1, -1, -1}, s{0, 0, 1, 1};
    EXPECT_THROW(eq_opp_gap(pred, y, s), UndefinedMetric);
    EXPECT_THROW(eq_opp_gap(pred, y, std::vector<int>{0, 0, 0, 0}), UndefinedMetric);
    EXPECT_THROW(group_rates(std::vector<int>{}, std::vector<int>{}, std::vector<int>{}), InvalidArgument);
}

TEST(MeanStd, SampleDeviationAndOmission) {
    const auto [m, sd] = mean_std({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(m, 2.5);
    ASSERT_TRUE(sd.has_value());
    EXPECT_DOUBLE_EQ(*sd, std::sqrt(5.0 / 3.0));
    EXPECT_FALSE(mean_std({1.0}).second.has_value());
}

TEST(Interpretability, IdentityTranslationHasNoDeltas) {
    const data::TabularDataset& d = small_synthetic();
    std::vector<int> px(d.size(), -1), pxt(d.size(), 1);
    const InterpretabilityDelta r = interpretability_report(d.x, d.x, px, pxt, d.y, d.schema);
    std::size_t positives = 0;
    for (int v : d.y) positives += v == 1;
    EXPECT_EQ(r.focus_size, positives);
    for (const auto& f : r.features) {
        EXPECT_EQ(f.changed_rows, 0u);
        std::size_t total = 0;
        for (const auto& c : f.categories) {
            EXPECT_EQ(c.before, c.after);
            total += c.before;
        }
        EXPECT_EQ(total, r.focus_size);
    }
}

TEST(Interpretability, FocusSubsetRankingAndCsv) {
    const data::TabularDataset& d = small_synthetic();
    Matrix xt = d.x;
    const data::FeatureBlock role = d.schema.block("role");
    std::vector<int> px(d.size(), 1), pxt(d.size(), 1);
    std::size_t expected_focus = 0, moved = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i % 3 == 0) px[i] = -1;
        if (i % 3 == 0 && d.y[i] == 1) {
            ++expected_focus;
            if (xt(i, role.offset) == 0.0) {
                for (std::size_t j = 0; j < role.width; ++j) xt(i, role.offset + j) = 0.1;
                xt(i, role.offset) = 0.7;
                ++moved;
            }
        }
    }
    const InterpretabilityDelta r = interpretability_report(d.x, xt, px, pxt, d.y, d.schema);
    EXPECT_EQ(r.focus_size, expected_focus);
    EXPECT_EQ(r.rank_of("role"), 1u);
    EXPECT_EQ(r.find("role")->changed_rows, moved);
    const auto& first = r.find("role")->categories.front();
    EXPECT_EQ(first.after, first.before + moved);
    const std::string csv = interpretability_csv(r);
    EXPECT_EQ(csv.rfind("rank,feature,changed_rows,focus_size,category,count_x,count_x_tilde,delta\n", 0), 0u);
    EXPECT_NE(csv.find("1,role,"), std::string::npos);
}

TEST(Interpretability, EmptyFocusSubsetIsValid) {
    const data::TabularDataset& d = small_synthetic();
    const std::vector<int> all_pos(d.size(), 1);
    const InterpretabilityDelta r = interpretability_report(d.x, d.x, all_pos, all_pos, d.y, d.schema);
    EXPECT_EQ(r.focus_size, 0u);
    ASSERT_FALSE(r.features.empty());
    for (const auto& c : r.features.front().categories) EXPECT_EQ(c.before + c.after, 0u);
}

TEST(Benchmark, ConstantClassifierScoresTheTestBaseRate) {
    BenchmarkOptions o = quick_options(small_synthetic().size());
    o.split.repeats = 1;
    o.representations = {Representation::x};
    o.methods = {Method::constant};
    o.interpretability = false;
    const EvalReport r = run_benchmark(small_synthetic(), o);
    const auto idx = data::split_indices(small_synthetic().size(), o.split, 0);
    std::size_t train_pos = 0, test_pos = 0;
    for (auto i : idx.train) train_pos += small_synthetic().y[i] == 1;
    for (auto i : idx.test) test_pos += small_synthetic().y[i] == 1;
    const double base = static_cast<double>(test_pos) / static_cast<double>(idx.test.size());
    const bool majority_positive = 2 * train_pos >= idx.train.size();
    EXPECT_DOUBLE_EQ(r.repeats[0].test_base_rate, base);
    EXPECT_DOUBLE_EQ(r.repeats[0].cells[0].accuracy, majority_positive ? base : 1.0 - base);
}

TEST(Benchmark, DeterministicAndIndependentOfOrderAndThreads) {
    BenchmarkOptions o = quick_options(small_synthetic().size());
    o.methods = {Method::lr, Method::svm, Method::kc_lr};
    const EvalReport a = run_benchmark(small_synthetic(), o);
    const EvalReport b = run_benchmark(small_synthetic(), o);
    EXPECT_EQ(report_json(a, {}).dump(), report_json(b, {}).dump());
    EXPECT_EQ(report_csv(a, "h", 1), report_csv(b, "h", 1));

    BenchmarkOptions reordered = o;
    reordered.methods = {Method::kc_lr, Method::svm, Method::lr};
    reordered.representations = {Representation::z, Representation::x, Representation::x_tilde};
    reordered.threads = 2;
    const EvalReport c = run_benchmark(small_synthetic(), reordered);
    ASSERT_EQ(c.repeats.size(), a.repeats.size());
    for (std::size_t r = 0; r < a.repeats.size(); ++r) {
        for (auto rep : o.representations)
            for (auto m : o.methods) {
                const CellResult& x = cell(a.repeats[r], rep, m);
                const CellResult& y = cell(c.repeats[r], rep, m);
                EXPECT_EQ(x.ok, y.ok);
                EXPECT_EQ(x.accuracy, y.accuracy);
                EXPECT_EQ(x.eq_opp, y.eq_opp);
                EXPECT_EQ(x.c, y.c);
            }
        EXPECT_EQ(interpretability_json(*a.repeats[r].interpretability),
                  interpretability_json(*c.repeats[r].interpretability));
    }
}

TEST(Benchmark, AggregatesMatchStoredRepeatValues) {
    BenchmarkOptions o = quick_options(small_synthetic().size());
    o.split.repeats = 3;
    o.representations = {Representation::x};
    o.methods = {Method::lr};
    o.interpretability = false;
    const EvalReport r = run_benchmark(small_synthetic(), o);
    std::vector<double> acc;
    for (const auto& rep : r.repeats) acc.push_back(rep.cells[0].accuracy);
    const Aggregate* a = r.find(Representation::x, Method::lr);
    ASSERT_NE(a, nullptr);
    EXPECT_EQ(a->n_ok, 3u);
    double mean = (acc[0] + acc[1] + acc[2]) / 3.0;
    EXPECT_NEAR(a->accuracy_mean, mean, 1e-15);
    double ss = 0;
    for (double v : acc) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(*a->accuracy_std, std::sqrt(ss / 2.0), 1e-15);
    const std::string csv = report_csv(r, "abc", 7);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    const nlohmann::json j = report_json(r, {{"seed", 5}});
    EXPECT_EQ(j.at("aggregates").size(), 1u);
    EXPECT_EQ(j.at("aggregates")[0].at("accuracy_mean_percent"), 100.0 * a->accuracy_mean);
}

TEST(Benchmark, StageFailureIsRecordedAndOtherCellsProceed) {
    data::TabularDataset d = small_synthetic();
    BenchmarkOptions o = quick_options(d.size());
    o.split.repeats = 1;
    o.methods = {Method::lr};
    o.interpretability = false;
    o.transformer.batch_size = 4;  // not larger than min_positive_per_batch: the transformer stage fails
    const EvalReport r = run_benchmark(d, o);
    EXPECT_TRUE(cell(r.repeats[0], Representation::x, Method::lr).ok);
    EXPECT_TRUE(cell(r.repeats[0], Representation::z, Method::lr).ok);
    EXPECT_FALSE(cell(r.repeats[0], Representation::x_tilde, Method::lr).ok);
    ASSERT_FALSE(r.repeats[0].errors.empty());
    EXPECT_EQ(r.find(Representation::x_tilde, Method::lr)->n_failed, 1u);
}

TEST(Benchmark, RawDataIsPreprocessedPerSplitWithWarnings) {
    data::RawTable t = data::synthesize_biased_records(600, 8);
    t.rows[5][t.column_index("role")] = "cousin";  // one rare category
    BenchmarkData bd;
    bd.raw = t;
    bd.preprocess = data::synthetic_preprocess_options();
    BenchmarkOptions o = quick_options(t.size());
    o.split.repeats = 1;
    o.representations = {Representation::x};
    o.methods = {Method::lr};
    o.interpretability = false;
    const auto idx = data::split_indices(t.size(), o.split, 0);
    const bool in_test = std::binary_search(idx.test.begin(), idx.test.end(), std::size_t{5});
    const EvalReport r = run_benchmark(bd, o);
    EXPECT_EQ(r.repeats[0].warnings.size(), in_test ? 1u : 0u);
    const auto [train, test] = bd.split(o.split, 0);
    double mean = 0;
    for (std::size_t i = 0; i < train.size(); ++i) mean += train.x(i, 0);
    EXPECT_NEAR(mean / static_cast<double>(train.size()), 0.0, 1e-12);
}

namespace {

// Ten repeats of the full pipeline on the biased generator (reduced iterations).
const EvalReport& synthetic_end_to_end() {
    static const EvalReport report = [] {
        const data::TabularDataset d = data::synthesize_biased(5000, 2024);
        BenchmarkOptions o;
        o.split = data::SplitSpec::proportional(d.size(), 0.7, 2024, 10);
        o.transformer.iterations = 10000;
        o.representations = {Representation::x, Representation::x_tilde};
        o.methods = {Method::lr, Method::svm};
        return run_benchmark(d, o);
    }();
    return report;
}

} // namespace

TEST(EndToEnd, TranslationLowersLogisticGapInMostRepeats) {
    int better = 0;
    for (const auto& rep : synthetic_end_to_end().repeats) {
        better += cell(rep, Representation::x_tilde, Method::lr).eq_opp < cell(rep, Representation::x, Method::lr).eq_opp;
    }
    EXPECT_GE(better, 8) << better << " of 10 repeats";
}

TEST(EndToEnd, ProxyCategoryShrinksInFocusSubset) {
    int shrank = 0;
    for (const auto& rep : synthetic_end_to_end().repeats) {
        ASSERT_TRUE(rep.interpretability.has_value());
        const FeatureDelta* role = rep.interpretability->find("role");
        ASSERT_NE(role, nullptr);
        const CategoryCount* wife = role->find("wife");
        shrank += wife && wife->after < wife->before;
    }
    EXPECT_GE(shrank, 6) << shrank << " of 10 repeats";
}
