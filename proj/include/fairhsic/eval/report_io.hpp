#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "fairhsic/data/table.hpp"
#include "fairhsic/eval/benchmark.hpp"

namespace fairhsic::eval {

inline constexpr const char* report_format = "fairhsic-report";
inline constexpr int report_version = 1;

inline nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json rates_json(const GroupRates& rates) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [group, c] : rates) {
        out.push_back({{"group", group},
                       {"tp", c.tp},
                       {"fn", c.fn},
                       {"fp", c.fp},
                       {"tn", c.tn},
                       {"tpr", c.tpr_defined() ? nlohmann::json(c.tpr()) : nlohmann::json(nullptr)},
                       {"fpr", c.negatives() ? nlohmann::json(c.fpr()) : nlohmann::json(nullptr)},
                       {"positive_rate", c.positive_rate()}});
    }
    return out;
}

inline nlohmann::json interpretability_json(const InterpretabilityDelta& d) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto& f : d.features) {
        nlohmann::json cats = nlohmann::json::array();
        for (const auto& c : f.categories) {
            cats.push_back({{"category", c.category}, {"count_x", c.before}, {"count_x_tilde", c.after}});
        }
        features.push_back({{"feature", f.feature}, {"changed_rows", f.changed_rows}, {"categories", cats}});
    }
    return {{"focus_size", d.focus_size}, {"features", features}};
}

// `context` carries the run fingerprint (config hash, master seed, data source).
inline nlohmann::json report_json(const EvalReport& r, const nlohmann::json& context) {
    nlohmann::json aggregates = nlohmann::json::array();
    for (const auto& a : r.aggregates) {
        aggregates.push_back({{"representation", to_string(a.representation)},
                              {"method", to_string(a.method)},
                              {"n_ok", a.n_ok},
                              {"n_failed", a.n_failed},
                              {"accuracy_mean", a.accuracy_mean},
                              {"accuracy_std", optional_number(a.accuracy_std)},
                              {"accuracy_mean_percent", 100.0 * a.accuracy_mean},
                              {"accuracy_std_percent",
                               optional_number(a.accuracy_std ? std::optional(100.0 * *a.accuracy_std) : std::nullopt)},
                              {"eq_opp_mean", a.eq_opp_mean},
                              {"eq_opp_std", optional_number(a.eq_opp_std)},
                              {"eq_opp_mean_percent", 100.0 * a.eq_opp_mean},
                              {"eq_opp_std_percent",
                               optional_number(a.eq_opp_std ? std::optional(100.0 * *a.eq_opp_std) : std::nullopt)}});
    }
    nlohmann::json repeats = nlohmann::json::array();
    for (const auto& rep : r.repeats) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : rep.cells) {
            nlohmann::json cell{{"representation", to_string(c.representation)},
                                {"method", to_string(c.method)},
                                {"ok", c.ok}};
            if (c.ok) {
                cell["accuracy"] = c.accuracy;
                cell["eq_opp"] = c.eq_opp;
                cell["group_rates"] = rates_json(c.rates);
                cell["c"] = c.c;
                cell["converged"] = c.converged;
            } else {
                cell["error"] = c.error;
            }
            cells.push_back(cell);
        }
        nlohmann::json jr{{"repeat", rep.repeat},
                          {"test_base_rate", rep.test_base_rate},
                          {"errors", rep.errors},
                          {"warnings", rep.warnings},
                          {"cells", cells}};
        if (rep.training) {
            jr["training"] = {{"skipped_steps", rep.training->skipped_steps},
                              {"decomposition_first_decile_median", rep.training->decomposition_first},
                              {"decomposition_last_decile_median", rep.training->decomposition_last}};
        }
        if (rep.interpretability) jr["interpretability"] = interpretability_json(*rep.interpretability);
        repeats.push_back(jr);
    }
    return {{"format", report_format},
            {"version", report_version},
            {"context", context},
            {"std_definition", "sample standard deviation over repeats (n-1); null below two repeats"},
            {"aggregates", aggregates},
            {"repeats", repeats}};
}

// One row per repeat x representation x method.
inline std::string report_csv(const EvalReport& r, const std::string& config_hash, std::uint64_t seed) {
    std::ostringstream out;
    out << "config_hash,seed,repeat,representation,method,ok,accuracy,accuracy_percent,eq_opp,eq_opp_percent,"
           "tpr_group0,tpr_group1,c,converged,error\n";
    auto tpr = [](const GroupRates& g, int group) -> std::string {
        auto it = g.find(group);
        if (it == g.end() || !it->second.tpr_defined()) return "";
        return data::format_double(it->second.tpr());
    };
    for (const auto& rep : r.repeats) {
        for (const auto& c : rep.cells) {
            out << config_hash << ',' << seed << ',' << rep.repeat << ',' << to_string(c.representation) << ',' << '"'
                << to_string(c.method) << '"' << ',' << (c.ok ? "true" : "false") << ',';
            if (c.ok) {
                out << data::format_double(c.accuracy) << ',' << data::format_double(100.0 * c.accuracy) << ','
                    << data::format_double(c.eq_opp) << ',' << data::format_double(100.0 * c.eq_opp) << ','
                    << tpr(c.rates, 0) << ',' << tpr(c.rates, 1) << ',' << data::format_double(c.c) << ','
                    << (c.converged ? "true" : "false") << ",\n";
            } else {
                std::string err = c.error;
                for (char& ch : err) {
                    if (ch == '"') ch = '\'';
                }
                out << ",,,,,,,," << '"' << err << '"' << '\n';
            }
        }
    }
    return out.str();
}

} // namespace fairhsic::eval
