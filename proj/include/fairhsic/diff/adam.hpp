#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "fairhsic/core/error.hpp"
#include "fairhsic/diff/graph.hpp"

namespace fairhsic::diff {

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First/second moment accumulators keyed by parameter name.
struct AdamState {
    AdamOptions options;
    std::size_t step = 0;
    Bindings m;
    Bindings v;
};

// One bias-corrected Adam update of every parameter that has a gradient.
// Parameters absent from `grads` are left untouched.
inline void adam_step(Bindings& params, const Bindings& grads, AdamState& state) {
    for (const auto& [name, g] : grads) {
        auto it = params.find(name);
        if (it == params.end()) throw InvalidArgument("gradient for unknown parameter '" + name + "'");
        if (!it->second.same_shape(g)) {
            throw ShapeError("adam: parameter '" + name + "' is " + it->second.shape_string() + ", gradient is " +
                             g.shape_string());
        }
    }
    ++state.step;
    const AdamOptions& o = state.options;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(o.beta1, t);
    const double c2 = 1.0 - std::pow(o.beta2, t);
    for (const auto& [name, g] : grads) {
        Matrix& p = params.at(name);
        auto [mi, m_new] = state.m.try_emplace(name, g.rows(), g.cols());
        auto [vi, v_new] = state.v.try_emplace(name, g.rows(), g.cols());
        if (!mi->second.same_shape(g) || !vi->second.same_shape(g)) {
            throw ShapeError("adam: moment shape for '" + name + "' does not match gradient");
        }
        double* pd = p.data().data();
        double* md = mi->second.data().data();
        double* vd = vi->second.data().data();
        const double* gd = g.data().data();
        for (std::size_t k = 0; k < g.size(); ++k) {
            md[k] = o.beta1 * md[k] + (1.0 - o.beta1) * gd[k];
            vd[k] = o.beta2 * vd[k] + (1.0 - o.beta2) * gd[k] * gd[k];
            const double mhat = md[k] / c1;
            const double vhat = vd[k] / c2;
            pd[k] -= o.learning_rate * mhat / (std::sqrt(vhat) + o.epsilon);
        }
    }
}

} // namespace fairhsic::diff
