#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fairhsic/kernels/bandwidth.hpp"
#include "fairhsic/kernels/graph_kernels.hpp"
#include "fairhsic/kernels/hsic.hpp"
#include "fairhsic/kernels/rbf.hpp"
#include "fairhsic/kernels/rff.hpp"

using namespace fairhsic;
using namespace fairhsic::kernels;
using diff::Matrix;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(r, c);
    for (double& v : m.data()) v = n(rng);
    return m;
}

Matrix random_binary_column(std::size_t n, std::mt19937_64& rng) {
    std::bernoulli_distribution b(0.5);
    Matrix m(n, 1);
    for (double& v : m.data()) v = b(rng) ? 1.0 : 0.0;
    return m;
}

// Explicit product: (N-1)^-2 tr(H K H L) with H = I - 11'/N.
double naive_biased(const Matrix& k, const Matrix& l) {
    const std::size_t n = k.rows();
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(n);
    const Matrix p = diff::matmul(diff::matmul(diff::matmul(h, k), h), l);
    double tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += p(i, i);
    return tr / std::pow(static_cast<double>(n - 1), 2);
}

// U-statistic in its term-by-term form with sums over distinct indices.
double quadruple_loop_unbiased(const Matrix& k, const Matrix& l) {
    const std::size_t n = k.rows();
    double t1 = 0, t2 = 0, t3 = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            t1 += k(i, j) * l(i, j);
            for (std::size_t q = 0; q < n; ++q) {
                if (q == i || q == j) continue;
                t3 += k(i, j) * l(i, q);
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == i || r == j || r == q) continue;
                    t2 += k(i, j) * l(q, r);
                }
            }
        }
    const double nn = static_cast<double>(n);
    const double n2 = nn * (nn - 1), n3 = n2 * (nn - 2), n4 = n3 * (nn - 3);
    return t1 / n2 + t2 / n4 - 2.0 * t3 / n3;
}

double exact_median(std::vector<double> v) {
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
    const double hi = v[m];
    if (v.size() % 2) return hi;
    return (*std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m)) + hi) / 2.0;
}

Matrix permute(const Matrix& k, const std::vector<std::size_t>& p) {
    Matrix out(k.rows(), k.cols());
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) out(i, j) = k(p[i], p[j]);
    return out;
}

} // namespace

TEST(RbfGram, SinglePointIsOne) {
    EXPECT_EQ(rbf_gram(Matrix{{0.3, -2.0}}, 0.7), (Matrix{{1.0}}));
}

TEST(RbfGram, TwoPointsOffDiagonal) {
    const Matrix k = rbf_gram(Matrix{{0.0}, {1.0}}, 1.0);
    EXPECT_NEAR(k(0, 1), 0.3678794, 1e-7);
    EXPECT_EQ(k(0, 1), k(1, 0));
}

TEST(RbfGram, MatchesDoubleLoop) {
    std::mt19937_64 rng(1);
    const Matrix x = random_matrix(20, 4, rng);
    const double gamma = 0.37;
    const Matrix k = rbf_gram(x, gamma);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j) {
            double d2 = 0;
            for (std::size_t c = 0; c < 4; ++c) d2 += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
            EXPECT_NEAR(k(i, j), std::exp(-gamma * d2), 1e-12);
            EXPECT_GT(k(i, j), 0.0);
            EXPECT_LE(k(i, j), 1.0);
        }
}

TEST(RbfGram, RejectsNonFiniteInputAndBadGamma) {
    EXPECT_THROW(rbf_gram(Matrix{{std::nan("")}}, 1.0), NonFiniteError);
    EXPECT_THROW(rbf_gram(Matrix{{0.0}}, 0.0), InvalidArgument);
}

TEST(HsicBiased, ConstantKernelGivesZero) {
    std::mt19937_64 rng(2);
    const Matrix l = rbf_gram(random_matrix(15, 2, rng), 0.5);
    EXPECT_NEAR(hsic_biased(Matrix::ones(15, 15), l).value, 0.0, 1e-12);
}

TEST(HsicBiased, TwoByTwoClosedForm) {
    const Matrix k{{1, 0.5}, {0.5, 1}}, l{{1, 0.2}, {0.2, 1}};
    EXPECT_NEAR(hsic_biased(k, l).value, 0.4, 1e-12);
    EXPECT_NEAR(naive_biased(k, l), 0.4, 1e-12);
}

TEST(HsicBiased, MatchesExplicitCenteringMatrix) {
    std::mt19937_64 rng(3);
    const Matrix k = rbf_gram(random_matrix(30, 3, rng), 0.4);
    const Matrix l = rbf_gram(random_matrix(30, 2, rng), 0.9);
    const HsicValue v = hsic_biased(k, l);
    EXPECT_NEAR(v.value, naive_biased(k, l), 1e-12);
    EXPECT_EQ(v.n, 30u);
    EXPECT_EQ(v.estimator, HsicEstimator::biased);
}

TEST(HsicBiased, RejectsSingleSample) {
    EXPECT_THROW(hsic_biased(Matrix{{1.0}}, Matrix{{1.0}}), InvalidArgument);
}

TEST(HsicBiased, RejectsMismatchedSizes) {
    EXPECT_THROW(hsic_biased(Matrix::ones(3, 3), Matrix::ones(4, 4)), ShapeError);
}

TEST(HsicUnbiased, IdentityKernelGivesZero) {
    std::mt19937_64 rng(4);
    const Matrix l = rbf_gram(random_matrix(12, 2, rng), 0.5);
    EXPECT_NEAR(hsic_unbiased(Matrix::identity(12), l).value, 0.0, 1e-15);
}

TEST(HsicUnbiased, MatchesQuadrupleLoop) {
    std::mt19937_64 rng(5);
    const Matrix k = rbf_gram(random_matrix(10, 3, rng), 0.3);
    const Matrix l = rbf_gram(random_matrix(10, 2, rng), 0.8);
    EXPECT_NEAR(hsic_unbiased(k, l).value, quadruple_loop_unbiased(k, l), 1e-12);
}

TEST(HsicUnbiased, RejectsFewerThanFourSamples) {
    EXPECT_THROW(hsic_unbiased(Matrix::identity(3), Matrix::identity(3)), InvalidArgument);
}

TEST(HsicUnbiased, NullDistributionIsCentred) {
    double sum = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        const Matrix x = random_matrix(200, 2, rng);
        const Matrix s = random_binary_column(200, rng);
        sum += hsic_unbiased(rbf_gram(x, 0.5), rbf_gram(s, 0.5)).value;
    }
    EXPECT_LT(std::abs(sum / 100.0), 0.01);
}

TEST(HsicProperties, SymmetryScalePermutationAndSign) {
    std::mt19937_64 rng(6);
    const Matrix k = rbf_gram(random_matrix(25, 3, rng), 0.6);
    const Matrix l = rbf_gram(random_binary_column(25, rng), 0.5);
    EXPECT_EQ(hsic_biased(k, l).value, hsic_biased(l, k).value);
    Matrix k3 = k;
    for (double& v : k3.data()) v *= 3.0;
    EXPECT_NEAR(hsic_biased(k3, l).value, 3.0 * hsic_biased(k, l).value, 1e-12);
    std::vector<std::size_t> p(25);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::shuffle(p.begin(), p.end(), rng);
    EXPECT_NEAR(hsic_biased(permute(k, p), permute(l, p)).value, hsic_biased(k, l).value, 1e-12);
    EXPECT_NEAR(hsic_unbiased(permute(k, p), permute(l, p)).value, hsic_unbiased(k, l).value, 1e-12);
    EXPECT_GE(hsic_biased(k, l).value, -1e-12);
}

TEST(HsicProperties, SingleProtectedGroupGivesZero) {
    std::mt19937_64 rng(7);
    const Matrix k = rbf_gram(random_matrix(20, 3, rng), 0.6);
    const Matrix l = rbf_gram(Matrix::ones(20, 1), 0.5);
    EXPECT_NEAR(hsic_biased(k, l).value, 0.0, 1e-12);
    EXPECT_NEAR(hsic_unbiased(k, l).value, 0.0, 1e-12);
}

TEST(HsicProperties, EstimatorDispatchAndNames) {
    EXPECT_EQ(parse_estimator("biased"), HsicEstimator::biased);
    EXPECT_EQ(parse_estimator("unbiased"), HsicEstimator::unbiased);
    EXPECT_EQ(to_string(HsicEstimator::unbiased), "unbiased");
    EXPECT_THROW(parse_estimator("other"), InvalidArgument);
}

TEST(HsicGraph, NodesMatchDirectEstimators) {
    std::mt19937_64 rng(8);
    const Matrix p = random_matrix(16, 3, rng);
    const Matrix l = rbf_gram(random_binary_column(16, rng), 0.5);
    for (auto est : {HsicEstimator::biased, HsicEstimator::unbiased}) {
        diff::Graph g;
        const auto k = rbf_gram_node(g, g.input("P"), 16, 0.4);
        const auto h = hsic_node(g, k, l, est);
        const double via_graph = g.forward({{"P", p}}, h).scalar_value();
        EXPECT_NEAR(via_graph, hsic(rbf_gram(p, 0.4), l, est).value, 1e-12);
        EXPECT_NEAR(g.forward({{"P", p}}, k).data()[5], rbf_gram(p, 0.4).data()[5], 1e-14);
    }
}

TEST(Rff, ComponentBoundAndDeterminism) {
    std::mt19937_64 rng(9);
    const Matrix x = random_matrix(50, 4, rng);
    const RffMap a = RffMap::sample(4, 200, 1.3, 77), b = RffMap::sample(4, 200, 1.3, 77);
    EXPECT_EQ(a, b);
    const Matrix fa = a.apply(x);
    EXPECT_EQ(fa, b.apply(x));
    const double bound = std::sqrt(2.0 / 200.0);
    for (double v : fa.data()) EXPECT_LE(std::abs(v), bound + 1e-15);
    for (double v : a.bias()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 2 * std::numbers::pi);
    }
}

TEST(Rff, SelfInnerProductConcentratesAtOne) {
    std::mt19937_64 rng(10);
    const Matrix x = random_matrix(200, 5, rng);
    const Matrix f = RffMap::sample(5, 10000, 1.0, 3).apply(x);
    double mean = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        const auto r = f.row_span(i);
        mean += std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    }
    EXPECT_NEAR(mean / 200.0, 1.0, 0.03);
}

TEST(Rff, ApproximatesGaussianKernel) {
    std::mt19937_64 rng(11);
    const double sigma = 2.0;
    const Matrix x = random_matrix(100, 5, rng), y = random_matrix(100, 5, rng);
    const RffMap map = RffMap::sample(5, 10000, sigma, 4);
    const Matrix fx = map.apply(x), fy = map.apply(y);
    double err = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        const auto a = fx.row_span(i), b = fy.row_span(i);
        double d2 = 0;
        for (std::size_t c = 0; c < 5; ++c) d2 += (x(i, c) - y(i, c)) * (x(i, c) - y(i, c));
        err += std::abs(std::inner_product(a.begin(), a.end(), b.begin(), 0.0) - std::exp(-d2 / (2 * sigma * sigma)));
    }
    EXPECT_LE(err / 100.0, 0.05);
}

TEST(Rff, DimensionMismatchAndJsonRoundTrip) {
    const RffMap map = RffMap::sample(3, 8, 0.9, 5);
    EXPECT_THROW(map.apply(Matrix(2, 4)), ShapeError);
    const nlohmann::json j = map;
    EXPECT_EQ(j.get<RffMap>(), map);
}

TEST(MedianHeuristic, SmallCases) {
    EXPECT_DOUBLE_EQ(median_heuristic(Matrix{{0.0}, {2.0}}), 2.0);
    EXPECT_DOUBLE_EQ(median_heuristic(Matrix{{0.0}, {1.0}, {3.0}}), 2.0);
}

TEST(MedianHeuristic, IdenticalPointsAreAnError) {
    EXPECT_THROW(median_heuristic(Matrix::ones(5, 2)), InvalidArgument);
}

TEST(MedianHeuristic, SubsampleMatchesFullPairwiseMedian) {
    std::mt19937_64 rng(12);
    const Matrix x = random_matrix(5000, 10, rng);
    std::vector<double> d;
    d.reserve(5000u * 4999u / 2u);
    for (std::size_t i = 0; i < 5000; ++i)
        for (std::size_t j = i + 1; j < 5000; ++j) {
            double s = 0;
            for (std::size_t c = 0; c < 10; ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
            d.push_back(std::sqrt(s));
        }
    const double full = exact_median(std::move(d));
    const double sigma = median_heuristic(x, 123);
    EXPECT_LT(std::abs(sigma - full) / full, 0.05);
    EXPECT_EQ(sigma, median_heuristic(x, 123));
}

TEST(MedianHeuristic, GammaFromSigma) {
    EXPECT_DOUBLE_EQ(gamma_from_sigma(2.0), 0.125);
}
