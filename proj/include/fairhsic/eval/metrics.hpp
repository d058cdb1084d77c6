#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "fairhsic/core/error.hpp"

namespace fairhsic::eval {

inline void check_lengths(std::span<const int> pred, std::span<const int> y) {
    if (pred.size() != y.size()) throw ShapeError("predictions and labels have different lengths");
}

inline double accuracy(std::span<const int> pred, std::span<const int> y) {
    check_lengths(pred, y);
    if (y.empty()) throw InvalidArgument("accuracy of an empty prediction set is undefined");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
    return static_cast<double>(correct) / static_cast<double>(y.size());
}

// Confusion counts of one protected group (labels and predictions in {+1,-1}).
struct GroupConfusion {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;

    std::size_t positives() const noexcept { return tp + fn; }
    std::size_t negatives() const noexcept { return fp + tn; }
    std::size_t support() const noexcept { return tp + fn + fp + tn; }
    bool tpr_defined() const noexcept { return positives() > 0; }
    double tpr() const {
        if (!tpr_defined()) throw UndefinedMetric("true positive rate undefined: group has no positive labels");
        return static_cast<double>(tp) / static_cast<double>(positives());
    }
    double fpr() const {
        if (negatives() == 0) throw UndefinedMetric("false positive rate undefined: group has no negative labels");
        return static_cast<double>(fp) / static_cast<double>(negatives());
    }
    double positive_rate() const {
        return static_cast<double>(tp + fp) / static_cast<double>(support());
    }
};

using GroupRates = std::map<int, GroupConfusion>;

inline GroupRates group_rates(std::span<const int> pred, std::span<const int> y, std::span<const int> s) {
    check_lengths(pred, y);
    if (s.size() != y.size()) throw ShapeError("protected vector length differs from labels");
    if (y.empty()) throw InvalidArgument("group rates of an empty prediction set are undefined");
    GroupRates out;
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto& c = out[s[i]];
        const bool p = pred[i] == 1, t = y[i] == 1;
        if (t && p) ++c.tp;
        else if (t) ++c.fn;
        else if (p) ++c.fp;
        else ++c.tn;
    }
    return out;
}

// |TPR_A - TPR_B| from the confusion counts of exactly two groups.
inline double eq_opp_gap(const GroupRates& rates) {
    if (rates.size() != 2) {
        throw UndefinedMetric("equal-opportunity gap needs exactly two protected groups, found " +
                              std::to_string(rates.size()));
    }
    const auto& a = rates.begin()->second;
    const auto& b = std::next(rates.begin())->second;
    if (!a.tpr_defined() || !b.tpr_defined()) {
        throw UndefinedMetric("equal-opportunity gap undefined: a group has no positive labels");
    }
    return std::abs(a.tpr() - b.tpr());
}

inline double eq_opp_gap(std::span<const int> pred, std::span<const int> y, std::span<const int> s) {
    return eq_opp_gap(group_rates(pred, y, s));
}

} // namespace fairhsic::eval
