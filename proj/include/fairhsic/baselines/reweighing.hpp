#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairhsic/core/error.hpp"

namespace fairhsic::baselines {

// Kamiran & Calders reweighing: w_i = count(s_i) count(y_i) / (N count(s_i, y_i)),
// which makes s and y independent in the weighted empirical distribution.
inline std::vector<double> kamiran_calders_weights(std::span<const int> s, std::span<const int> y) {
    if (s.size() != y.size()) throw ShapeError("reweighing: s and y lengths differ");
    if (s.empty()) throw InvalidArgument("reweighing needs at least one row");
    std::map<int, std::size_t> ns, ny;
    std::map<std::pair<int, int>, std::size_t> nsy;
    for (std::size_t i = 0; i < s.size(); ++i) {
        ++ns[s[i]];
        ++ny[y[i]];
        ++nsy[{s[i], y[i]}];
    }
    for (const auto& [g, _] : ns) {
        for (const auto& [label, __] : ny) {
            if (!nsy.count({g, label})) {
                throw InvalidArgument("reweighing: no rows with s=" + std::to_string(g) + " and y=" +
                                      std::to_string(label));
            }
        }
    }
    const double n = static_cast<double>(s.size());
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        w[i] = static_cast<double>(ns[s[i]]) * static_cast<double>(ny[y[i]]) /
               (n * static_cast<double>(nsy[{s[i], y[i]}]));
    }
    return w;
}

} // namespace fairhsic::baselines
