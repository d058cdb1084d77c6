#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fairhsic/diff/graph.hpp"

namespace fairhsic::diff {

struct GradientCheckEntry {
    std::string parameter;
    double max_relative_error = 0.0;
    bool passed = false;
};

struct GradientCheckReport {
    std::vector<GradientCheckEntry> entries;
    double tolerance = 0.0;

    bool passed() const {
        return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
    }
    double worst() const {
        double w = 0.0;
        for (const auto& e : entries) w = std::max(w, e.max_relative_error);
        return w;
    }
};

// Central-difference gradient of the graph output with respect to one bound
// parameter. The graph is re-evaluated 2 * size(parameter) times.
inline Matrix numerical_gradient(Graph& graph, Var output, Bindings bindings, const std::string& parameter,
                                 double step = 1e-5) {
    Matrix& p = bindings.at(parameter);
    Matrix grad(p.rows(), p.cols());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double orig = p.data()[k];
        p.data()[k] = orig + step;
        const double up = graph.forward(bindings, output).scalar_value();
        p.data()[k] = orig - step;
        const double down = graph.forward(bindings, output).scalar_value();
        p.data()[k] = orig;
        grad.data()[k] = (up - down) / (2.0 * step);
    }
    return grad;
}

// Norm-wise relative error max|a - n| / max(max|a|, max|n|). Entry-wise ratios
// blow up on entries whose true gradient is zero, so the scale is taken over
// the whole parameter.
inline double relative_gradient_error(const Matrix& analytic, const Matrix& numeric) {
    const double diff = max_abs_diff(analytic, numeric);
    double scale = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        scale = std::max({scale, std::abs(analytic.data()[k]), std::abs(numeric.data()[k])});
    }
    if (scale == 0.0) return diff;
    return diff / scale;
}

inline GradientCheckReport compare_gradients(const Bindings& analytic, const Bindings& numeric, double tolerance) {
    GradientCheckReport report;
    report.tolerance = tolerance;
    for (const auto& [name, num] : numeric) {
        const double err = relative_gradient_error(analytic.at(name), num);
        report.entries.push_back({name, err, err < tolerance});
    }
    return report;
}

// Compares the analytic gradient of `output` against central differences for
// every named parameter.
inline GradientCheckReport finite_difference_check(Graph& graph, Var output, const Bindings& bindings,
                                                   const std::vector<std::string>& parameters, double tolerance,
                                                   double step = 1e-5) {
    graph.forward(bindings, output);
    const Bindings analytic = graph.backward();
    Bindings numeric;
    for (const auto& name : parameters) numeric.emplace(name, numerical_gradient(graph, output, bindings, name, step));
    return compare_gradients(analytic, numeric, tolerance);
}

inline GradientCheckReport finite_difference_check(Graph& graph, Var output, const Bindings& bindings,
                                                   double tolerance, double step = 1e-5) {
    return finite_difference_check(graph, output, bindings, graph.parameter_names(), tolerance, step);
}

} // namespace fairhsic::diff
