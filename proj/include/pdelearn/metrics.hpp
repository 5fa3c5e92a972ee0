#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pdelearn/errors.hpp"
#include "pdelearn/grid.hpp"
#include "pdelearn/sparse_regression.hpp"

namespace pdelearn {

/// Relative mean-squared error: sum of squared deviations over the squared
/// norm of the truth. Falls back to plain MSE when the truth is identically
/// zero.
inline double rmse(const Field& approx, const Field& truth) {
    if (approx.values.rows() != truth.values.rows() ||
        approx.values.cols() != truth.values.cols())
        throw GridError("rmse requires fields on the same grid");
    const double denom = truth.values.squaredNorm();
    const double num = (approx.values - truth.values).squaredNorm();
    if (denom == 0.0) return num / static_cast<double>(truth.values.size());
    return num / denom;
}

struct TprScore {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    double value = 1.0;  // tp / (tp + fn + fp); 1 when all three are zero
};

/// True positive ratio between a learned support and the generating support.
inline TprScore tpr(const std::set<std::string>& learned, const std::set<std::string>& truth) {
    TprScore s;
    for (const auto& term : learned)
        (truth.count(term) ? s.tp : s.fp)++;
    for (const auto& term : truth)
        if (!learned.count(term)) s.fn++;
    const std::size_t total = s.tp + s.fn + s.fp;
    s.value = total == 0 ? 1.0 : static_cast<double>(s.tp) / static_cast<double>(total);
    return s;
}

/// Box-plot statistics of a sample: type-7 quartiles, 1.5 IQR whiskers
/// clamped to the data, and the points beyond them.
struct Distribution {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> outliers;
};

inline Distribution summarize_distribution(std::vector<double> values) {
    if (values.empty()) throw Error("cannot summarize an empty sample");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] * (1.0 - frac) + values[hi] * frac;
    };
    Distribution d;
    d.median = quantile(0.5);
    d.q1 = quantile(0.25);
    d.q3 = quantile(0.75);
    d.min = values.front();
    d.max = values.back();
    const double iqr = d.q3 - d.q1;
    const double lo_fence = d.q1 - 1.5 * iqr;
    const double hi_fence = d.q3 + 1.5 * iqr;
    d.whisker_lo = d.max;
    d.whisker_hi = d.min;
    for (const double v : values) {
        if (v < lo_fence || v > hi_fence)
            d.outliers.push_back(v);
        else {
            d.whisker_lo = std::min(d.whisker_lo, v);
            d.whisker_hi = std::max(d.whisker_hi, v);
        }
    }
    return d;
}

/// Modal learned equation over many splits plus the TPR distribution.
struct EquationSummary {
    std::vector<std::string> modal_support;           // sorted term labels
    std::map<std::string, double> mean_coefficients;  // over runs with the modal support
    std::size_t modal_count = 0;
    std::size_t total_runs = 0;
    bool modal_tie = false;
    std::vector<double> tpr_values;  // one per run, input order
    Distribution tpr_distribution;
};

/**
 * Groups learned equations by support set; the most common support is the
 * final equation and its coefficients are the per-term means over the runs
 * that produced it. A modal tie is broken lexicographically and flagged.
 */
inline EquationSummary aggregate_equations(const std::vector<LearnedEquation>& runs,
                                           const std::set<std::string>& truth) {
    if (runs.empty()) throw Error("aggregate_equations requires at least one run");
    std::map<std::vector<std::string>, std::size_t> counts;
    for (const auto& eq : runs) {
        const auto s = eq.support();
        counts[std::vector<std::string>(s.begin(), s.end())]++;
    }
    EquationSummary out;
    out.total_runs = runs.size();
    std::size_t best = 0;
    for (const auto& [support, count] : counts) {
        if (count > best) {
            best = count;
            out.modal_support = support;
            out.modal_tie = false;
        } else if (count == best) {
            out.modal_tie = true;  // lexicographically smallest support already kept
        }
    }
    out.modal_count = best;

    std::map<std::string, double> sums;
    std::size_t matching = 0;
    const std::set<std::string> modal(out.modal_support.begin(), out.modal_support.end());
    for (const auto& eq : runs) {
        out.tpr_values.push_back(tpr(eq.support(), truth).value);
        if (eq.support() != modal) continue;
        ++matching;
        for (const auto& term : out.modal_support) sums[term] += eq.coefficient(term);
    }
    for (const auto& term : out.modal_support)
        out.mean_coefficients[term] = sums[term] / static_cast<double>(matching);
    out.tpr_distribution = summarize_distribution(out.tpr_values);
    return out;
}

}  // namespace pdelearn
