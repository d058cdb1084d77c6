#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include <json.hpp>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/matrix.hpp"

namespace fairhsic::kernels {

using diff::Matrix;

// Random Fourier feature map phi(x) = sqrt(2/D) cos(x theta + b).
// theta entries are N(0, 1/sigma^2), so phi(x)'phi(y) approximates
// exp(-|x - y|^2 / (2 sigma^2)); b is uniform on [0, 2 pi).
class RffMap {
public:
    RffMap() = default;
    RffMap(Matrix theta, std::vector<double> bias, double sigma, std::uint64_t seed)
        : theta_(std::move(theta)), bias_(std::move(bias)), sigma_(sigma), seed_(seed) {
        if (theta_.cols() != bias_.size()) {
            throw ShapeError("RFF projection has " + std::to_string(theta_.cols()) + " columns but " +
                                   std::to_string(bias_.size()) + " biases");
        }
    }

    static RffMap sample(std::size_t input_dim, std::size_t output_dim, double sigma, std::uint64_t seed) {
        if (input_dim == 0 || output_dim == 0) throw InvalidArgument("RFF dimensions must be positive");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("RFF bandwidth must be positive");
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0 / sigma);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        Matrix theta(input_dim, output_dim);
        for (double& v : theta.data()) v = normal(rng);
        std::vector<double> bias(output_dim);
        for (double& v : bias) v = phase(rng);
        return RffMap(std::move(theta), std::move(bias), sigma, seed);
    }

    std::size_t input_dim() const noexcept { return theta_.rows(); }
    std::size_t output_dim() const noexcept { return theta_.cols(); }
    double sigma() const noexcept { return sigma_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const Matrix& theta() const noexcept { return theta_; }
    const std::vector<double>& bias() const noexcept { return bias_; }
    double amplitude() const noexcept { return std::sqrt(2.0 / static_cast<double>(output_dim())); }

    Matrix bias_row() const { return Matrix::row(bias_); }

    Matrix apply(const Matrix& x) const {
        if (x.cols() != input_dim()) {
            throw ShapeError("RFF map expects " + std::to_string(input_dim()) + " columns, got " +
                                   std::to_string(x.cols()));
        }
        if (!x.all_finite()) throw NonFiniteError("RFF input contains non-finite values");
        Matrix out = diff::matmul(x, theta_);
        const double amp = amplitude();
        for (std::size_t r = 0; r < out.rows(); ++r) {
            auto row = out.row_span(r);
            for (std::size_t c = 0; c < row.size(); ++c) row[c] = amp * std::cos(row[c] + bias_[c]);
        }
        return out;
    }

    friend bool operator==(const RffMap&, const RffMap&) = default;

private:
    Matrix theta_;
    std::vector<double> bias_;
    double sigma_ = 1.0;
    std::uint64_t seed_ = 0;
};

inline void to_json(nlohmann::json& j, const RffMap& m) {
    j = nlohmann::json{{"input_dim", m.input_dim()},
                       {"output_dim", m.output_dim()},
                       {"sigma", m.sigma()},
                       {"seed", m.seed()},
                       {"theta", m.theta().data()},
                       {"bias", m.bias()}};
}

inline void from_json(const nlohmann::json& j, RffMap& m) {
    const auto d = j.at("input_dim").get<std::size_t>();
    const auto big_d = j.at("output_dim").get<std::size_t>();
    m = RffMap(Matrix(d, big_d, j.at("theta").get<std::vector<double>>()), j.at("bias").get<std::vector<double>>(),
               j.at("sigma").get<double>(), j.at("seed").get<std::uint64_t>());
}

} // namespace fairhsic::kernels
