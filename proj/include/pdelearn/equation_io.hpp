#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdelearn/metrics.hpp"
#include "pdelearn/sparse_regression.hpp"

namespace pdelearn {

/// Three-significant-digit coefficient rendering, Supplementary-table style.
inline std::string fmt_coefficient(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

/// "u_t = -0.8*u_x + 0.01*u_xx"; the zero equation renders as "u_t = 0".
inline std::string render_equation(const LearnedEquation& eq) {
    std::string out = "u_t = ";
    bool any = false;
    for (Eigen::Index i = 0; i < eq.xi.size(); ++i) {
        const double c = eq.xi(i);
        if (c == 0.0) continue;
        if (!any) {
            out += fmt_coefficient(c);
        } else {
            out += c < 0.0 ? " - " : " + ";
            out += fmt_coefficient(std::abs(c));
        }
        out += "*" + eq.labels[static_cast<std::size_t>(i)];
        any = true;
    }
    if (!any) out += "0";
    return out;
}

inline nlohmann::json equation_to_json(const LearnedEquation& eq) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < eq.xi.size(); ++i) coeffs.push_back(eq.xi(i));
    nlohmann::json support = nlohmann::json::array();
    for (const auto& s : eq.support()) support.push_back(s);
    return {{"labels", eq.labels},
            {"coefficients", coeffs},
            {"support", support},
            {"val0", eq.val0},
            {"k", eq.k},
            {"alpha", eq.alpha},
            {"seed", eq.split_seed},
            {"method", eq.method},
            {"sigma", eq.sigma},
            {"rank_deficient", eq.rank_deficient},
            {"rendered", render_equation(eq)}};
}

inline LearnedEquation equation_from_json(const nlohmann::json& j) {
    LearnedEquation eq;
    eq.labels = j.at("labels").get<std::vector<std::string>>();
    const auto coeffs = j.at("coefficients").get<std::vector<double>>();
    eq.xi.resize(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        eq.xi(static_cast<Eigen::Index>(i)) = coeffs[i];
    eq.val0 = j.at("val0").get<double>();
    eq.k = j.at("k").get<double>();
    eq.alpha = j.at("alpha").get<double>();
    eq.split_seed = j.at("seed").get<std::uint64_t>();
    eq.method = j.at("method").get<std::string>();
    eq.sigma = j.at("sigma").get<double>();
    eq.rank_deficient = j.at("rank_deficient").get<bool>();
    return eq;
}

inline nlohmann::json summary_to_json(const EquationSummary& s) {
    return {{"modal_support", s.modal_support},
            {"mean_coefficients", s.mean_coefficients},
            {"modal_count", s.modal_count},
            {"total_runs", s.total_runs},
            {"modal_tie", s.modal_tie},
            {"tpr",
             {{"median", s.tpr_distribution.median},
              {"q1", s.tpr_distribution.q1},
              {"q3", s.tpr_distribution.q3},
              {"whisker_lo", s.tpr_distribution.whisker_lo},
              {"whisker_hi", s.tpr_distribution.whisker_hi},
              {"min", s.tpr_distribution.min},
              {"max", s.tpr_distribution.max},
              {"outliers", s.tpr_distribution.outliers}}}};
}

}  // namespace pdelearn
