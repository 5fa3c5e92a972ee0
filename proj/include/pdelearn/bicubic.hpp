#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>

#include "pdelearn/dataset.hpp"
#include "pdelearn/derivative_bundle.hpp"
#include "pdelearn/errors.hpp"

namespace pdelearn {

namespace detail {

constexpr int kWindow = 11;          // points per axis in the local window
constexpr int kHalf = kWindow / 2;
constexpr int kBasis = 16;           // tensor-product cubic: x^a t^b, 0 <= a,b <= 3

/// Basis row (and its first/second derivatives in xi, first in eta) at one
/// local coordinate. Local coordinates live in [-1, 1]^2.
struct BasisRows {
    Eigen::Matrix<double, 1, kBasis> val, d_xi, d_xixi, d_eta;
};

inline BasisRows basis_rows(double xi, double eta) {
    BasisRows r;
    double px[4] = {1.0, xi, xi * xi, xi * xi * xi};
    double pt[4] = {1.0, eta, eta * eta, eta * eta * eta};
    double dpx[4] = {0.0, 1.0, 2.0 * xi, 3.0 * xi * xi};
    double ddpx[4] = {0.0, 0.0, 2.0, 6.0 * xi};
    double dpt[4] = {0.0, 1.0, 2.0 * eta, 3.0 * eta * eta};
    int c = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b, ++c) {
            r.val(c) = px[a] * pt[b];
            r.d_xi(c) = dpx[a] * pt[b];
            r.d_xixi(c) = ddpx[a] * pt[b];
            r.d_eta(c) = px[a] * dpt[b];
        }
    return r;
}

/// Weight vectors mapping the 121 window values directly to the fitted value
/// and derivatives at one query offset inside the window.
struct QueryWeights {
    Eigen::Matrix<double, kWindow * kWindow, 1> val, d_xi, d_xixi, d_eta;
};

}  // namespace detail

/**
 * Local cubic bi-spline regression: for every grid point an 11x11 window of
 * observations (clamped inside the domain near the edges) is fit with a full
 * tensor-product cubic surface by ordinary least squares, and the surface's
 * value and analytic derivatives are evaluated at the query point.
 *
 * The window design matrix is identical for every window once coordinates
 * are recentered to [-1,1]^2, so its pseudo-inverse is formed once and each
 * grid point reduces to four dot products.
 */
inline DerivativeBundle spline_bundle(const NoisyDataset& ds) {
    using namespace detail;
    const Grid& g = ds.observed.grid;
    const auto nx = static_cast<Eigen::Index>(g.nx());
    const auto nt = static_cast<Eigen::Index>(g.nt());
    if (nx < kWindow || nt < kWindow)
        throw InsufficientPointsError("bi-spline regression needs at least an 11x11 grid");

    // Canonical design matrix over the window lattice; row order is
    // x-offset major to match the value gather below.
    Eigen::Matrix<double, kWindow * kWindow, kBasis> design;
    for (int k = 0; k < kWindow; ++k)
        for (int l = 0; l < kWindow; ++l)
            design.row(k * kWindow + l) =
                basis_rows((k - kHalf) / double(kHalf), (l - kHalf) / double(kHalf)).val;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const auto& rdiag = qr.matrixR().diagonal();
    const double cond = std::abs(rdiag(0)) / std::abs(rdiag(kBasis - 1));
    if (qr.rank() < kBasis || cond > 1e12) throw SingularFitError(0, 0);
    const Eigen::MatrixXd pinv =
        qr.solve(Eigen::MatrixXd::Identity(kWindow * kWindow, kWindow * kWindow));

    // Chain-rule factors from local [-1,1] coordinates to physical units.
    const double sx = 1.0 / (kHalf * g.dx());
    const double st = 1.0 / (kHalf * g.dt());

    // One weight set per (query x-offset, query t-offset) pair; interior
    // points all use the centered pair (5, 5).
    std::array<detail::QueryWeights, kWindow * kWindow> weights;
    for (int px = 0; px < kWindow; ++px)
        for (int pt = 0; pt < kWindow; ++pt) {
            const BasisRows q = basis_rows((px - kHalf) / double(kHalf),
                                           (pt - kHalf) / double(kHalf));
            auto& w = weights[static_cast<std::size_t>(px * kWindow + pt)];
            w.val = (q.val * pinv).transpose();
            w.d_xi = (q.d_xi * pinv).transpose() * sx;
            w.d_xixi = (q.d_xixi * pinv).transpose() * (sx * sx);
            w.d_eta = (q.d_eta * pinv).transpose() * st;
        }

    const Eigen::MatrixXd& obs = ds.observed.values;
    Field u = Field::zeros(g, "u");
    Field ut = Field::zeros(g, "u_t");
    Field ux = Field::zeros(g, "u_x");
    Field uxx = Field::zeros(g, "u_xx");

    Eigen::Matrix<double, kWindow * kWindow, 1> window;
    for (Eigen::Index i = 0; i < nx; ++i) {
        const Eigen::Index a = std::clamp<Eigen::Index>(i - kHalf, 0, nx - kWindow);
        for (Eigen::Index j = 0; j < nt; ++j) {
            const Eigen::Index b = std::clamp<Eigen::Index>(j - kHalf, 0, nt - kWindow);
            for (int k = 0; k < kWindow; ++k)
                window.segment<kWindow>(k * kWindow) =
                    obs.row(a + k).segment<kWindow>(b).transpose();
            const auto& w =
                weights[static_cast<std::size_t>((i - a) * kWindow + (j - b))];
            u.values(i, j) = w.val.dot(window);
            ux.values(i, j) = w.d_xi.dot(window);
            uxx.values(i, j) = w.d_xixi.dot(window);
            ut.values(i, j) = w.d_eta.dot(window);
        }
    }
    return DerivativeBundle{std::move(u), std::move(ut), std::move(ux), std::move(uxx),
                            DenoiseMethod::Spline};
}

}  // namespace pdelearn
