#pragma once

#include <Eigen/Dense>

#include "pdelearn/dataset.hpp"
#include "pdelearn/derivative_bundle.hpp"
#include "pdelearn/errors.hpp"

namespace pdelearn {

namespace detail {

/// Row-wise d/dcol: second-order central differences on interior columns,
/// one-sided first-order at the two edge columns.
inline Eigen::MatrixXd differentiate_columns(const Eigen::MatrixXd& v, double step) {
    const Eigen::Index n = v.cols();
    Eigen::MatrixXd d(v.rows(), n);
    d.col(0) = (v.col(1) - v.col(0)) / step;
    d.col(n - 1) = (v.col(n - 1) - v.col(n - 2)) / step;
    for (Eigen::Index j = 1; j < n - 1; ++j)
        d.col(j) = (v.col(j + 1) - v.col(j - 1)) / (2.0 * step);
    return d;
}

}  // namespace detail

/**
 * Finite-difference derivative approximations taken directly from the
 * observations: no smoothing, so this is the naive baseline. Second
 * derivatives are formed by applying the first-derivative rules to the u_x
 * field rather than by a dedicated 3-point stencil.
 */
inline DerivativeBundle fd_bundle(const NoisyDataset& ds) {
    const Grid& g = ds.observed.grid;
    if (g.nx() < 3 || g.nt() < 3)
        throw InsufficientPointsError("finite differences need at least 3 points per axis");

    const Eigen::MatrixXd& u = ds.observed.values;
    Eigen::MatrixXd ux = detail::differentiate_columns(u.transpose(), g.dx()).transpose();
    Eigen::MatrixXd ut = detail::differentiate_columns(u, g.dt());
    Eigen::MatrixXd uxx = detail::differentiate_columns(ux.transpose(), g.dx()).transpose();

    return DerivativeBundle{Field(g, u, "u"), Field(g, std::move(ut), "u_t"),
                            Field(g, std::move(ux), "u_x"), Field(g, std::move(uxx), "u_xx"),
                            DenoiseMethod::FD};
}

}  // namespace pdelearn
