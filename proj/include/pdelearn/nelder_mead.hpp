#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace pdelearn {

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double diameter_tol = 1e-8;  // relative simplex diameter
    int max_iterations = 2000;
    double initial_step_rel = 0.05;  // per-coordinate simplex perturbation
    double initial_step_abs = 1e-4;  // used where a coordinate is zero
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Derivative-free simplex minimization. Convergence is geometric (relative
 * simplex diameter below tolerance), so adding a constant to the objective
 * cannot change the returned argmin. Fully deterministic for a fixed start.
 */
template <typename F>
NelderMeadResult nelder_mead(F&& objective, const Eigen::VectorXd& start,
                             const NelderMeadOptions& opts = {}) {
    const Eigen::Index n = start.size();
    std::vector<Eigen::VectorXd> verts(static_cast<std::size_t>(n) + 1, start);
    for (Eigen::Index i = 0; i < n; ++i) {
        double step = opts.initial_step_rel * std::abs(start(i));
        if (step == 0.0) step = opts.initial_step_abs;
        verts[static_cast<std::size_t>(i) + 1](i) += step;
    }
    std::vector<double> vals(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i) vals[i] = objective(verts[i]);

    std::vector<std::size_t> order(verts.size());
    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        double diameter = 0.0;
        for (std::size_t i = 0; i < verts.size(); ++i)
            diameter = std::max(diameter, (verts[i] - verts[best]).norm());
        if (diameter <= opts.diameter_tol * (1.0 + verts[best].norm())) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (const std::size_t i : order)
            if (i != worst) centroid += verts[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected =
            centroid + opts.reflection * (centroid - verts[worst]);
        const double f_ref = objective(reflected);

        if (f_ref < vals[best]) {
            const Eigen::VectorXd expanded =
                centroid + opts.expansion * (reflected - centroid);
            const double f_exp = objective(expanded);
            if (f_exp < f_ref) {
                verts[worst] = expanded;
                vals[worst] = f_exp;
            } else {
                verts[worst] = reflected;
                vals[worst] = f_ref;
            }
        } else if (f_ref < vals[second_worst]) {
            verts[worst] = reflected;
            vals[worst] = f_ref;
        } else {
            const bool outside = f_ref < vals[worst];
            const Eigen::VectorXd contracted =
                outside ? Eigen::VectorXd(centroid + opts.contraction * (reflected - centroid))
                        : Eigen::VectorXd(centroid - opts.contraction * (centroid - verts[worst]));
            const double f_con = objective(contracted);
            if (f_con < (outside ? f_ref : vals[worst])) {
                verts[worst] = contracted;
                vals[worst] = f_con;
            } else {
                for (const std::size_t i : order) {
                    if (i == best) continue;
                    verts[i] = verts[best] + opts.shrink * (verts[i] - verts[best]);
                    vals[i] = objective(verts[i]);
                }
            }
        }
    }

    const std::size_t best = static_cast<std::size_t>(
        std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = verts[best];
    res.value = vals[best];
    return res;
}

}  // namespace pdelearn
