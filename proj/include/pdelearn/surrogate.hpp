#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pdelearn/dataset.hpp"
#include "pdelearn/derivative_bundle.hpp"
#include "pdelearn/errors.hpp"
#include "pdelearn/rng.hpp"

namespace pdelearn {

/**
 * Single-hidden-layer surrogate h(x,t) = w2 * softplus(w1 * [x t]' + b1) + b2.
 *
 * Softplus keeps the surrogate smooth in all derivatives, which is what makes
 * the analytic u_x / u_xx / u_t extraction behave; saturating activations
 * produce oscillatory higher derivatives.
 */
struct SurrogateNet {
    Eigen::MatrixXd w1;     // H x 2
    Eigen::VectorXd b1;     // H
    Eigen::RowVectorXd w2;  // 1 x H
    double b2 = 0.0;

    Eigen::Index hidden() const { return w1.rows(); }

    double forward(double x, double t) const {
        double acc = b2;
        for (Eigen::Index k = 0; k < w1.rows(); ++k) {
            const double z = w1(k, 0) * x + w1(k, 1) * t + b1(k);
            acc += w2(k) * softplus(z);
        }
        return acc;
    }

    static double softplus(double z) {
        return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    }
    static double sigmoid(double z) { return 0.5 * (1.0 + std::tanh(0.5 * z)); }
};

struct PointDerivatives {
    double h, h_t, h_x, h_xx;
};

/// Closed-form value and partial derivatives of the surrogate at one point,
/// using softplus' = sigmoid and softplus'' = sigmoid * (1 - sigmoid).
inline PointDerivatives analytic_derivatives(const SurrogateNet& net, double x, double t) {
    PointDerivatives out{net.b2, 0.0, 0.0, 0.0};
    for (Eigen::Index k = 0; k < net.w1.rows(); ++k) {
        const double z = net.w1(k, 0) * x + net.w1(k, 1) * t + net.b1(k);
        const double s = SurrogateNet::sigmoid(z);
        const double wx = net.w1(k, 0);
        out.h += net.w2(k) * SurrogateNet::softplus(z);
        out.h_x += net.w2(k) * s * wx;
        out.h_t += net.w2(k) * s * net.w1(k, 1);
        out.h_xx += net.w2(k) * s * (1.0 - s) * wx * wx;
    }
    return out;
}

namespace detail {

inline Eigen::ArrayXXd softplus_array(const Eigen::ArrayXXd& z) {
    return z.max(0.0) + (-z.abs()).exp().log1p();
}
inline Eigen::ArrayXXd sigmoid_array(const Eigen::ArrayXXd& z) {
    return 0.5 * (1.0 + (0.5 * z).tanh());
}

/// Batched forward pass: columns of x_batch are [x t]' pairs.
inline Eigen::VectorXd forward_batch(const SurrogateNet& net, const Eigen::Matrix2Xd& x_batch) {
    const Eigen::ArrayXXd z =
        ((net.w1 * x_batch).colwise() + net.b1).array();
    return (net.w2 * softplus_array(z).matrix()).transpose().array() + net.b2;
}

inline double guarded_denominator(double h, double gamma) {
    if (gamma == 0.0) return 1.0;
    const double a = std::abs(h);
    return a < 1e-4 ? 1.0 : std::pow(a, gamma);
}

}  // namespace detail

/**
 * Generalized least squares cost: mean of ((h - u_obs) / |h|^gamma)^2 with
 * |h| < 1e-4 replaced by 1 in the denominator. gamma = 0 recovers ordinary
 * least squares. Coordinates are min-max normalized to [0,1] to match the
 * training convention.
 */
inline double gls_cost(const SurrogateNet& net, const NoisyDataset& ds, double gamma) {
    const Grid& g = ds.observed.grid;
    const AffineScale xs{g.x().front(), g.x().back()};
    const AffineScale ts{g.t().front(), g.t().back()};
    double acc = 0.0;
    for (std::size_t j = 0; j < g.nt(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double h = net.forward(xs.apply(g.x()[i]), ts.apply(g.t()[j]));
            const double r = (h - ds.observed.values(static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(j))) /
                             detail::guarded_denominator(h, gamma);
            acc += r * r;
        }
    return acc / static_cast<double>(g.nx() * g.nt());
}

struct TrainConfig {
    Eigen::Index hidden = 1000;
    double gamma = 1.0;
    double lambda = 0.0;
    Eigen::Index batch_size = 10;
    int patience = 50;
    double val_fraction = 0.1;
    double step_size = 1e-3;   // Adam defaults
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_epochs = 5000;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(val_fraction > 0.0 && val_fraction < 1.0))
            throw ConfigError("val_fraction must lie in (0,1)");
        if (patience < 1) throw ConfigError("patience must be >= 1");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (hidden < 1) throw ConfigError("hidden width must be >= 1");
    }
};

/// Normalization applied before training: values to [0,1] via the dataset
/// scale, coordinates to [0,1] via their grid extents.
struct AnnScaling {
    AffineScale value;
    AffineScale x;
    AffineScale t;
};

struct LossGradients {
    double loss = 0.0;
    Eigen::MatrixXd g_w1;
    Eigen::VectorXd g_b1;
    Eigen::RowVectorXd g_w2;
    double g_b2 = 0.0;
};

/**
 * Full training loss over the given points: GLS term, lambda penalty on the
 * hidden pre-activations, and a squared penalty on outputs escaping [0,1]
 * (softplus is unbounded, so without it h can blow up under gamma = 1).
 */
inline double training_loss(const SurrogateNet& net, const Eigen::Matrix2Xd& pts,
                            const Eigen::VectorXd& targets, double gamma, double lambda) {
    const Eigen::Index n = pts.cols();
    const Eigen::MatrixXd z = (net.w1 * pts).colwise() + net.b1;
    const Eigen::VectorXd h =
        (net.w2 * detail::softplus_array(z.array()).matrix()).transpose().array() + net.b2;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = (h(i) - targets(i)) / detail::guarded_denominator(h(i), gamma);
        acc += r * r;
        if (h(i) < 0.0 || h(i) > 1.0) acc += h(i) * h(i);
    }
    if (lambda != 0.0) acc += lambda * z.squaredNorm();
    return acc / static_cast<double>(n);
}

/// Analytic gradient of training_loss, differentiated through the GLS
/// denominator (away from the |h| = 1e-4 guard switch and the penalty edges).
inline LossGradients loss_gradients(const SurrogateNet& net, const Eigen::Matrix2Xd& pts,
                                    const Eigen::VectorXd& targets, double gamma,
                                    double lambda) {
    const Eigen::Index n = pts.cols();
    const Eigen::MatrixXd z = (net.w1 * pts).colwise() + net.b1;
    const Eigen::ArrayXXd sp = detail::softplus_array(z.array());
    const Eigen::ArrayXXd sig = detail::sigmoid_array(z.array());
    const Eigen::VectorXd h = (net.w2 * sp.matrix()).transpose().array() + net.b2;

    double loss = 0.0;
    Eigen::VectorXd dh(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = h(i) - targets(i);
        const double a = std::abs(h(i));
        if (gamma == 0.0 || a < 1e-4) {
            loss += r * r;
            dh(i) = 2.0 * r;
        } else {
            const double d2 = std::pow(a, -2.0 * gamma);
            loss += r * r * d2;
            dh(i) = 2.0 * r * d2 -
                    2.0 * gamma * r * r * d2 / h(i);  // d|h|^-2g/dh = -2g|h|^-2g-1 sgn(h)
        }
        if (h(i) < 0.0 || h(i) > 1.0) {
            loss += h(i) * h(i);
            dh(i) += 2.0 * h(i);
        }
    }
    if (lambda != 0.0) loss += lambda * z.squaredNorm();

    const double inv_n = 1.0 / static_cast<double>(n);
    LossGradients g;
    g.loss = loss * inv_n;
    g.g_b2 = dh.sum() * inv_n;
    g.g_w2 = (sp.matrix() * dh).transpose() * inv_n;
    Eigen::MatrixXd dz =
        ((net.w2.transpose() * dh.transpose()).array() * sig).matrix() * inv_n;
    if (lambda != 0.0) dz += (2.0 * lambda * inv_n) * z;
    g.g_w1 = dz * pts.transpose();
    g.g_b1 = dz.rowwise().sum();
    return g;
}

struct TrainResult {
    SurrogateNet net;
    AnnScaling scaling;
    double best_val_cost = 0.0;
    int epochs_run = 0;
    std::vector<double> val_history;
    std::vector<Eigen::Index> val_points;  // flat indices j * nx + i of the held-out set
};

namespace detail {

struct AdamState {
    Eigen::ArrayXXd m, v;
    explicit AdamState(Eigen::Index rows, Eigen::Index cols)
        : m(Eigen::ArrayXXd::Zero(rows, cols)), v(Eigen::ArrayXXd::Zero(rows, cols)) {}

    template <typename Param, typename Grad>
    void update(Param&& p, const Grad& g, const TrainConfig& cfg, double bias1, double bias2) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g.array();
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.array().square();
        p.array() -= cfg.step_size * (m / bias1) / ((v / bias2).sqrt() + cfg.epsilon);
    }
};

inline double validation_cost(const SurrogateNet& net, const Eigen::Matrix2Xd& pts,
                              const Eigen::VectorXd& targets, double gamma) {
    const Eigen::VectorXd h = forward_batch(net, pts);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        const double r = (h(i) - targets(i)) / guarded_denominator(h(i), gamma);
        acc += r * r;
    }
    return acc / static_cast<double>(h.size());
}

}  // namespace detail

/**
 * Fits the surrogate to a rescaled dataset by stochastic first-order descent
 * with adaptive moments. Points are split 90/10 into train/validation; the
 * snapshot with the lowest validation GLS cost is returned, and training
 * stops once validation has not improved for `patience` consecutive epochs.
 * Fully deterministic for a fixed seed.
 */
inline TrainResult train_surrogate(const NoisyDataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    const Grid& g = ds.observed.grid;
    const Eigen::Index nx = static_cast<Eigen::Index>(g.nx());
    const Eigen::Index n = nx * static_cast<Eigen::Index>(g.nt());

    AnnScaling scaling{ds.scale,
                       AffineScale{g.x().front(), g.x().back()},
                       AffineScale{g.t().front(), g.t().back()}};

    Eigen::Matrix2Xd coords(2, n);
    Eigen::VectorXd targets(n);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(g.nt()); ++j)
        for (Eigen::Index i = 0; i < nx; ++i) {
            const Eigen::Index p = j * nx + i;
            coords(0, p) = scaling.x.apply(g.x()[static_cast<std::size_t>(i)]);
            coords(1, p) = scaling.t.apply(g.t()[static_cast<std::size_t>(j)]);
            targets(p) = ds.observed.values(i, j);
        }

    // Per-point 90/10 split.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng split_rng(derive_seed(cfg.seed, {0}));
    split_rng.shuffle(order);
    const auto n_val = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::llround(cfg.val_fraction * static_cast<double>(n))));
    const Eigen::Index n_train = n - n_val;
    std::vector<Eigen::Index> train_idx(order.begin(), order.begin() + n_train);
    std::vector<Eigen::Index> val_idx(order.begin() + n_train, order.end());

    Eigen::Matrix2Xd val_pts(2, n_val);
    Eigen::VectorXd val_targets(n_val);
    for (Eigen::Index i = 0; i < n_val; ++i) {
        val_pts.col(i) = coords.col(val_idx[static_cast<std::size_t>(i)]);
        val_targets(i) = targets(val_idx[static_cast<std::size_t>(i)]);
    }

    // Uniform +-1/sqrt(fan_in) weights, zero biases.
    Rng init_rng(derive_seed(cfg.seed, {1}));
    const Eigen::Index hid = cfg.hidden;
    SurrogateNet net{Eigen::MatrixXd(hid, 2), Eigen::VectorXd::Zero(hid),
                     Eigen::RowVectorXd(hid), 0.0};
    const double s1 = 1.0 / std::sqrt(2.0);
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hid));
    for (Eigen::Index k = 0; k < hid; ++k) {
        net.w1(k, 0) = init_rng.uniform(-s1, s1);
        net.w1(k, 1) = init_rng.uniform(-s1, s1);
    }
    for (Eigen::Index k = 0; k < hid; ++k) net.w2(k) = init_rng.uniform(-s2, s2);

    detail::AdamState st_w1(hid, 2), st_b1(hid, 1), st_w2(1, hid), st_b2(1, 1);
    Eigen::Matrix<double, 1, 1> b2_mat;
    b2_mat(0, 0) = net.b2;

    Rng epoch_rng(derive_seed(cfg.seed, {2}));
    TrainResult result;
    result.scaling = scaling;
    result.val_points = val_idx;
    SurrogateNet best = net;
    double best_val = std::numeric_limits<double>::infinity();
    int stale = 0;
    long step = 0;

    Eigen::Matrix2Xd batch_pts(2, cfg.batch_size);
    Eigen::VectorXd batch_targets(cfg.batch_size);

    int epoch = 0;
    for (; epoch < cfg.max_epochs; ++epoch) {
        epoch_rng.shuffle(train_idx);
        for (Eigen::Index start = 0; start < n_train; start += cfg.batch_size) {
            const Eigen::Index b = std::min(cfg.batch_size, n_train - start);
            for (Eigen::Index i = 0; i < b; ++i) {
                const Eigen::Index p = train_idx[static_cast<std::size_t>(start + i)];
                batch_pts.col(i) = coords.col(p);
                batch_targets(i) = targets(p);
            }
            const LossGradients lg = loss_gradients(net, batch_pts.leftCols(b),
                                                    batch_targets.head(b), cfg.gamma,
                                                    cfg.lambda);
            if (!std::isfinite(lg.loss))
                throw DivergenceError("ANN training loss became non-finite (epoch " +
                                          std::to_string(epoch) + ", batch " +
                                          std::to_string(start / cfg.batch_size) + ")",
                                      static_cast<std::size_t>(epoch));
            ++step;
            const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            st_w1.update(net.w1, lg.g_w1, cfg, bias1, bias2);
            st_b1.update(net.b1, lg.g_b1, cfg, bias1, bias2);
            st_w2.update(net.w2, lg.g_w2, cfg, bias1, bias2);
            Eigen::Matrix<double, 1, 1> gb2;
            gb2(0, 0) = lg.g_b2;
            st_b2.update(b2_mat, gb2, cfg, bias1, bias2);
            net.b2 = b2_mat(0, 0);
        }

        const double val = detail::validation_cost(net, val_pts, val_targets, cfg.gamma);
        result.val_history.push_back(val);
        if (val < best_val) {
            best_val = val;
            best = net;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            ++epoch;
            break;
        }
    }

    result.net = std::move(best);
    result.best_val_cost = best_val;
    result.epochs_run = epoch;
    return result;
}

/**
 * Evaluates the trained surrogate's analytic derivatives on every grid point
 * and restores original units: the value scale is inverted and the
 * coordinate normalization is undone through the chain rule.
 */
inline DerivativeBundle ann_bundle(const SurrogateNet& net, const Grid& grid,
                                   const AnnScaling& scaling) {
    Field u = Field::zeros(grid, "u");
    Field ut = Field::zeros(grid, "u_t");
    Field ux = Field::zeros(grid, "u_x");
    Field uxx = Field::zeros(grid, "u_xx");
    const double vspan = scaling.value.span();
    const double inv_x = 1.0 / scaling.x.span();
    const double inv_t = 1.0 / scaling.t.span();
    for (std::size_t j = 0; j < grid.nt(); ++j) {
        const double tn = scaling.t.apply(grid.t()[j]);
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const PointDerivatives d =
                analytic_derivatives(net, scaling.x.apply(grid.x()[i]), tn);
            const auto ei = static_cast<Eigen::Index>(i);
            const auto ej = static_cast<Eigen::Index>(j);
            u.values(ei, ej) = scaling.value.invert(d.h);
            ux.values(ei, ej) = vspan * d.h_x * inv_x;
            uxx.values(ei, ej) = vspan * d.h_xx * inv_x * inv_x;
            ut.values(ei, ej) = vspan * d.h_t * inv_t;
        }
    }
    return DerivativeBundle{std::move(u), std::move(ut), std::move(ux), std::move(uxx),
                            DenoiseMethod::ANN};
}

}  // namespace pdelearn
