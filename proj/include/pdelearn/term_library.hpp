#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pdelearn/derivative_bundle.hpp"
#include "pdelearn/errors.hpp"
#include "pdelearn/models.hpp"

namespace pdelearn {

/// The d = 12 candidate-term contract (p = 2). This order is frozen so that
/// coefficient indices are stable across methods and runs.
inline const std::vector<std::string>& term_labels() {
    static const std::vector<std::string> labels = {
        "1",      "u",      "u^2",      "u_x",    "u*u_x",    "u^2*u_x",
        "u_xx",   "u*u_xx", "u^2*u_xx", "u_x^2",  "u_x*u_xx", "u_xx^2"};
    return labels;
}

constexpr std::size_t kNumTerms = 12;

/// Nonzero terms of each generating equation, in library labels.
inline std::vector<std::string> true_support(ModelKind kind) {
    switch (kind) {
        case ModelKind::DiffusionAdvection: return {"u_x", "u_xx"};
        case ModelKind::FisherKpp: return {"u", "u^2", "u_xx"};
        case ModelKind::NonlinearFisherKpp: return {"u", "u^2", "u*u_xx", "u_x^2"};
    }
    return {};
}

struct SubsampleOptions {
    std::size_t skip = 0;    // time indices dropped from the front
    std::size_t stride = 1;  // keep every stride-th remaining time index
};

/// The surrogate has trouble with the early diffusion-advection transient,
/// so that preset skips the first 20 timepoints and keeps every fifth
/// remaining one; the Fisher presets keep everything.
inline SubsampleOptions default_subsample(ModelKind kind) {
    if (kind == ModelKind::DiffusionAdvection) return {20, 5};
    return {0, 1};
}

/**
 * Candidate-term matrix Theta plus the regression target u_t, evaluated at
 * the retained space-time points. Rows are ordered retained-time major,
 * space minor; point_index maps each row back to original grid coordinates.
 */
struct Library {
    Eigen::MatrixXd theta;                                  // R x 12
    Eigen::VectorXd target;                                 // u_t, length R
    std::vector<std::string> labels;                        // term_labels()
    std::vector<std::pair<std::size_t, std::size_t>> point_index;
    std::size_t nx = 0;                                     // retained grid width
    std::vector<std::size_t> retained_times;                // original j per retained slice

    std::size_t rows() const { return static_cast<std::size_t>(theta.rows()); }
    std::size_t retained_nt() const { return retained_times.size(); }
};

/// Assembles Theta and u_t from a derivative bundle in original units.
inline Library build_library(const DerivativeBundle& bundle, SubsampleOptions opts = {}) {
    const Grid& g = bundle.grid();
    if (opts.stride == 0) throw ConfigError("subsample stride must be >= 1");

    std::vector<std::size_t> times;
    for (std::size_t j = opts.skip; j < g.nt(); j += opts.stride) times.push_back(j);
    if (times.empty())
        throw Error("subsampling removed every timepoint; library is empty");

    const std::size_t nx = g.nx();
    const std::size_t rows = nx * times.size();
    Library lib;
    lib.labels = term_labels();
    lib.nx = nx;
    lib.retained_times = times;
    lib.theta.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(kNumTerms));
    lib.target.resize(static_cast<Eigen::Index>(rows));
    lib.point_index.reserve(rows);

    Eigen::Index r = 0;
    for (const std::size_t j : times) {
        const auto ej = static_cast<Eigen::Index>(j);
        for (std::size_t i = 0; i < nx; ++i, ++r) {
            const auto ei = static_cast<Eigen::Index>(i);
            const double u = bundle.u.values(ei, ej);
            const double ux = bundle.u_x.values(ei, ej);
            const double uxx = bundle.u_xx.values(ei, ej);
            lib.theta(r, 0) = 1.0;
            lib.theta(r, 1) = u;
            lib.theta(r, 2) = u * u;
            lib.theta(r, 3) = ux;
            lib.theta(r, 4) = u * ux;
            lib.theta(r, 5) = u * u * ux;
            lib.theta(r, 6) = uxx;
            lib.theta(r, 7) = u * uxx;
            lib.theta(r, 8) = u * u * uxx;
            lib.theta(r, 9) = ux * ux;
            lib.theta(r, 10) = ux * uxx;
            lib.theta(r, 11) = uxx * uxx;
            lib.target(r) = bundle.u_t.values(ei, ej);
            lib.point_index.emplace_back(i, j);
        }
    }
    return lib;
}

}  // namespace pdelearn
