#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pdelearn/dataset.hpp"
#include "pdelearn/errors.hpp"
#include "pdelearn/nelder_mead.hpp"
#include "pdelearn/surrogate.hpp"
#include "pdelearn/term_library.hpp"

namespace pdelearn {

/// A fixed-structure right-hand side u_t = sum_j c_j * term_j built from the
/// 12-term library contract, simulated forward from a measured profile.
struct CandidatePde {
    std::vector<std::string> support;   // library term labels
    Eigen::VectorXd coefficients;       // initial guess, one per support term
    Grid grid;                          // data lattice the simulation is sampled onto
    Eigen::VectorXd initial_profile;    // first retained time slice

    void validate() const {
        if (coefficients.size() != static_cast<Eigen::Index>(support.size()))
            throw ConfigError("coefficient count does not match candidate support");
        if (initial_profile.size() != static_cast<Eigen::Index>(grid.nx()))
            throw ConfigError("initial profile length does not match grid");
        const auto& labels = term_labels();
        for (const auto& s : support)
            if (std::find(labels.begin(), labels.end(), s) == labels.end())
                throw ConfigError("unknown candidate term: " + s);
    }
};

struct SimulationOutcome {
    Field field;
    bool diverged = false;
    std::size_t divergence_step = 0;
};

namespace detail {

/// u_x and u_xx by central differences with zero-flux (mirror) boundaries.
inline void spatial_derivatives(const Eigen::VectorXd& u, double dx, Eigen::VectorXd& ux,
                                Eigen::VectorXd& uxx) {
    const Eigen::Index m = u.size();
    const double inv2dx = 0.5 / dx;
    const double inv_dx2 = 1.0 / (dx * dx);
    ux(0) = 0.0;
    ux(m - 1) = 0.0;
    uxx(0) = 2.0 * (u(1) - u(0)) * inv_dx2;
    uxx(m - 1) = 2.0 * (u(m - 2) - u(m - 1)) * inv_dx2;
    for (Eigen::Index i = 1; i < m - 1; ++i) {
        ux(i) = (u(i + 1) - u(i - 1)) * inv2dx;
        uxx(i) = (u(i + 1) - 2.0 * u(i) + u(i - 1)) * inv_dx2;
    }
}

inline double term_value(int index, double u, double ux, double uxx) {
    switch (index) {
        case 0: return 1.0;
        case 1: return u;
        case 2: return u * u;
        case 3: return ux;
        case 4: return u * ux;
        case 5: return u * u * ux;
        case 6: return uxx;
        case 7: return u * uxx;
        case 8: return u * u * uxx;
        case 9: return ux * ux;
        case 10: return ux * uxx;
        case 11: return uxx * uxx;
        default: throw ConfigError("bad term index");
    }
}

inline int term_index(const std::string& label) {
    const auto& labels = term_labels();
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    throw ConfigError("unknown term label: " + label);
}

}  // namespace detail

/**
 * Explicit method-of-lines forward solve of the candidate PDE. The internal
 * step is re-derived from the trial's diffusion-like coefficients (those
 * multiplying u_xx); without a second-order term the data step is used.
 * Blow-up is reported through the diverged flag rather than an exception so
 * the optimizer can penalize the trial and move on.
 */
inline SimulationOutcome simulate_candidate(const CandidatePde& pde,
                                            const Eigen::VectorXd& coeffs) {
    pde.validate();
    if (coeffs.size() != static_cast<Eigen::Index>(pde.support.size()))
        throw ConfigError("coefficient vector does not match candidate support");
    const Grid& g = pde.grid;
    const auto m = static_cast<Eigen::Index>(g.nx());

    std::vector<int> idx(pde.support.size());
    for (std::size_t a = 0; a < pde.support.size(); ++a)
        idx[a] = detail::term_index(pde.support[a]);

    // Effective diffusion bound for the stability step.
    const double umax = pde.initial_profile.cwiseAbs().maxCoeff();
    double d_eff = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        if (idx[a] == 6) d_eff += std::abs(coeffs(static_cast<Eigen::Index>(a)));
        if (idx[a] == 7) d_eff += std::abs(coeffs(static_cast<Eigen::Index>(a))) * umax;
        if (idx[a] == 8) d_eff += std::abs(coeffs(static_cast<Eigen::Index>(a))) * umax * umax;
    }
    const double dt_internal =
        d_eff > 0.0 ? std::min(0.4 * g.dx() * g.dx() / d_eff, g.dt()) : g.dt();

    SimulationOutcome out{Field::zeros(g, "u_sim"), false, 0};
    Eigen::VectorXd u = pde.initial_profile, ux(m), uxx(m), rhs(m);
    out.field.values.col(0) = u;
    std::size_t global_step = 0;
    for (std::size_t j = 1; j < g.nt(); ++j) {
        const double span = g.t()[j] - g.t()[j - 1];
        const auto steps = static_cast<std::size_t>(std::ceil(span / dt_internal - 1e-12));
        const double dt = span / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s, ++global_step) {
            detail::spatial_derivatives(u, g.dx(), ux, uxx);
            for (Eigen::Index i = 0; i < m; ++i) {
                double f = 0.0;
                for (std::size_t a = 0; a < idx.size(); ++a)
                    f += coeffs(static_cast<Eigen::Index>(a)) *
                         detail::term_value(idx[a], u(i), ux(i), uxx(i));
                rhs(i) = f;
            }
            u += dt * rhs;
            if (!u.allFinite() || u.cwiseAbs().maxCoeff() > 1e12) {
                out.diverged = true;
                out.divergence_step = global_step;
                return out;
            }
        }
        out.field.values.col(static_cast<Eigen::Index>(j)) = u;
    }
    return out;
}

constexpr double kDivergencePenalty = 1e10;

/// GLS cost of a simulated field against the observations (same guard rule
/// as the surrogate cost). Divergent simulations score kDivergencePenalty.
inline double candidate_cost(const CandidatePde& pde, const Eigen::VectorXd& coeffs,
                             const NoisyDataset& observations, double gamma) {
    const SimulationOutcome sim = simulate_candidate(pde, coeffs);
    if (sim.diverged) return kDivergencePenalty;
    const Eigen::MatrixXd& h = sim.field.values;
    const Eigen::MatrixXd& y = observations.observed.values;
    if (h.rows() != y.rows() || h.cols() != y.cols())
        throw GridError("candidate grid does not match observations");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i) {
            const double r =
                (h(i, j) - y(i, j)) / detail::guarded_denominator(h(i, j), gamma);
            acc += r * r;
        }
    return acc / static_cast<double>(h.size());
}

struct FitResult {
    Eigen::VectorXd coefficients;
    double cost = 0.0;
    double initial_cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Coefficient refinement by derivative-free simplex search over the
 * candidate's coefficients, starting from the learned-equation values.
 */
inline FitResult fit_coefficients(const CandidatePde& pde, const NoisyDataset& observations,
                                  double gamma, const NelderMeadOptions& opts = {}) {
    pde.validate();
    const auto objective = [&](const Eigen::VectorXd& c) {
        return candidate_cost(pde, c, observations, gamma);
    };

    // Probe the initial simplex; if every vertex diverges the search cannot
    // gain traction.
    bool any_ok = objective(pde.coefficients) < kDivergencePenalty;
    for (Eigen::Index i = 0; i < pde.coefficients.size() && !any_ok; ++i) {
        Eigen::VectorXd v = pde.coefficients;
        double step = opts.initial_step_rel * std::abs(v(i));
        if (step == 0.0) step = opts.initial_step_abs;
        v(i) += step;
        any_ok = objective(v) < kDivergencePenalty;
    }
    if (!any_ok)
        throw Error("every initial simplex vertex diverges; try smaller initial coefficients");

    const double initial = objective(pde.coefficients);
    const NelderMeadResult nm = nelder_mead(objective, pde.coefficients, opts);
    FitResult out;
    out.coefficients = nm.x;
    out.cost = nm.value;
    out.initial_cost = initial;
    out.iterations = nm.iterations;
    out.converged = nm.converged;
    return out;
}

}  // namespace pdelearn
