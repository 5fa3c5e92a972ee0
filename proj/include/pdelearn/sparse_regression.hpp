#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "pdelearn/derivative_bundle.hpp"
#include "pdelearn/errors.hpp"
#include "pdelearn/rng.hpp"
#include "pdelearn/term_library.hpp"

namespace pdelearn {

/**
 * Train/validation partition at the granularity of 5x5 tiles of adjacent
 * retained space-time points, so neighboring samples never leak across the
 * two sets. Half of the tiles (rounded up) go to training.
 */
struct TileSplit {
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> val_rows;
    int tile_size = 5;
    std::uint64_t seed = 0;
};

inline TileSplit make_split(const Library& lib, int tile_size = 5, std::uint64_t seed = 0) {
    if (tile_size < 1) throw ConfigError("tile_size must be >= 1");
    const auto ts = static_cast<std::size_t>(tile_size);
    const std::size_t tiles_x = (lib.nx + ts - 1) / ts;
    const std::size_t tiles_t = (lib.retained_nt() + ts - 1) / ts;
    const std::size_t n_tiles = tiles_x * tiles_t;

    std::vector<std::size_t> tile_ids(n_tiles);
    for (std::size_t k = 0; k < n_tiles; ++k) tile_ids[k] = k;
    Rng rng(seed);
    rng.shuffle(tile_ids);

    std::vector<char> is_train(n_tiles, 0);
    const std::size_t n_train_tiles = (n_tiles + 1) / 2;
    for (std::size_t k = 0; k < n_train_tiles; ++k) is_train[tile_ids[k]] = 1;

    TileSplit split;
    split.tile_size = tile_size;
    split.seed = seed;
    for (std::size_t r = 0; r < lib.rows(); ++r) {
        const std::size_t i = r % lib.nx;
        const std::size_t jt = r / lib.nx;
        const std::size_t tile = (i / ts) + tiles_x * (jt / ts);
        (is_train[tile] ? split.train_rows : split.val_rows)
            .push_back(static_cast<Eigen::Index>(r));
    }
    return split;
}

/// Sparse coefficient vector with the selection metadata needed to report
/// and reproduce it.
struct LearnedEquation {
    Eigen::VectorXd xi;                 // length 12, original column units
    std::vector<std::string> labels;    // term_labels()
    double val0 = 0.0;                  // validation MSE of the selected model
    double k = 0.0;                     // selected greedy tolerance
    double alpha = -1.0;                // pruning threshold, -1 if not pruned
    bool rank_deficient = false;
    std::string method = "unknown";     // provenance
    double sigma = 0.0;
    std::uint64_t split_seed = 0;

    std::set<std::string> support() const {
        std::set<std::string> s;
        for (Eigen::Index i = 0; i < xi.size(); ++i)
            if (xi(i) != 0.0) s.insert(labels[static_cast<std::size_t>(i)]);
        return s;
    }
    std::size_t support_size() const {
        std::size_t n = 0;
        for (Eigen::Index i = 0; i < xi.size(); ++i)
            if (xi(i) != 0.0) ++n;
        return n;
    }
    double coefficient(const std::string& label) const {
        for (Eigen::Index i = 0; i < xi.size(); ++i)
            if (labels[static_cast<std::size_t>(i)] == label) return xi(i);
        throw ConfigError("unknown term label: " + label);
    }
};

namespace detail {

/// Subset least squares on precomputed Gram blocks. Returns the training MSE
/// (mean squared residual) and the coefficients for the subset.
class SubsetSolver {
public:
    SubsetSolver(const Eigen::MatrixXd& theta, const Eigen::VectorXd& y)
        : gram_(theta.transpose() * theta),
          xty_(theta.transpose() * y),
          yty_(y.squaredNorm()),
          n_(static_cast<double>(theta.rows())) {}

    double base_mse() const { return yty_ / n_; }

    double mse(const std::vector<int>& support, Eigen::VectorXd* coeffs = nullptr) const {
        const auto s = static_cast<Eigen::Index>(support.size());
        if (s == 0) {
            if (coeffs) coeffs->resize(0);
            return yty_ / n_;
        }
        Eigen::MatrixXd g(s, s);
        Eigen::VectorXd c(s);
        for (Eigen::Index a = 0; a < s; ++a) {
            c(a) = xty_(support[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < s; ++b)
                g(a, b) = gram_(support[static_cast<std::size_t>(a)],
                                support[static_cast<std::size_t>(b)]);
        }
        const Eigen::VectorXd beta = g.ldlt().solve(c);
        if (coeffs) *coeffs = beta;
        const double ssr = std::max(0.0, yty_ - 2.0 * c.dot(beta) + beta.dot(g * beta));
        return ssr / n_;
    }

private:
    Eigen::MatrixXd gram_;
    Eigen::VectorXd xty_;
    double yty_;
    double n_;
};

}  // namespace detail

struct GreedyOptions {
    double backward_fraction = 0.5;  // delete when MSE increase < fraction * last gain
    int max_forward_steps = 48;
};

/**
 * Forward-backward greedy subset selection with stopping tolerance k: terms
 * are added while the best single addition reduces training MSE by more than
 * k, and after each addition any term whose removal costs less than half the
 * last gain is deleted. Columns are scaled to unit norm during selection so
 * gains are comparable across terms; the returned coefficients come from an
 * unregularized least-squares refit on the raw columns.
 */
inline LearnedEquation greedy_fit(const Eigen::MatrixXd& theta, const Eigen::VectorXd& ut,
                                  double k, const GreedyOptions& opts = {}) {
    if (k < 0.0) throw ConfigError("greedy tolerance k must be >= 0");
    const Eigen::Index d = theta.cols();

    Eigen::MatrixXd scaled = theta;
    Eigen::VectorXd col_norm(d);
    std::vector<char> usable(static_cast<std::size_t>(d), 1);
    for (Eigen::Index j = 0; j < d; ++j) {
        col_norm(j) = theta.col(j).norm();
        if (col_norm(j) > 0.0)
            scaled.col(j) /= col_norm(j);
        else
            usable[static_cast<std::size_t>(j)] = 0;
    }
    detail::SubsetSolver solver(scaled, ut);

    std::vector<int> support;
    double loss = solver.base_mse();
    int forward_steps = 0;
    while (static_cast<Eigen::Index>(support.size()) < d &&
           forward_steps < opts.max_forward_steps) {
        // Forward: best single addition.
        int best_j = -1;
        double best_loss = loss;
        for (int j = 0; j < d; ++j) {
            if (!usable[static_cast<std::size_t>(j)]) continue;
            if (std::find(support.begin(), support.end(), j) != support.end()) continue;
            std::vector<int> trial = support;
            trial.push_back(j);
            const double l = solver.mse(trial);
            if (l < best_loss) {
                best_loss = l;
                best_j = j;
            }
        }
        const double gain = loss - best_loss;
        if (best_j < 0 || !(gain > k) || !(gain > 0.0)) break;
        support.push_back(best_j);
        loss = best_loss;
        ++forward_steps;

        // Backward: drop terms that barely matter.
        while (support.size() > 1) {
            int worst = -1;
            double worst_loss = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < support.size(); ++a) {
                std::vector<int> trial = support;
                trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(a));
                const double l = solver.mse(trial);
                if (l < worst_loss) {
                    worst_loss = l;
                    worst = static_cast<int>(a);
                }
            }
            if (worst < 0 || !(worst_loss - loss < opts.backward_fraction * gain)) break;
            support.erase(support.begin() + worst);
            loss = worst_loss;
        }
    }

    LearnedEquation eq;
    eq.labels = term_labels();
    eq.xi = Eigen::VectorXd::Zero(d);
    eq.k = k;
    if (!support.empty()) {
        std::sort(support.begin(), support.end());
        Eigen::MatrixXd sub(theta.rows(), static_cast<Eigen::Index>(support.size()));
        for (std::size_t a = 0; a < support.size(); ++a)
            sub.col(static_cast<Eigen::Index>(a)) = theta.col(support[a]);
        // Raw-column refit; SVD gives the minimum-norm solution when the
        // selected submatrix is rank deficient.
        Eigen::BDCSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd beta = svd.solve(ut);
        eq.rank_deficient = svd.rank() < static_cast<Eigen::Index>(support.size());
        for (std::size_t a = 0; a < support.size(); ++a)
            eq.xi(support[a]) = beta(static_cast<Eigen::Index>(a));
    }
    return eq;
}

/// 51-value default hyperparameter grid: 0 plus 50 log-spaced tolerances
/// between 1e-3 and 1e3.
inline std::vector<double> default_k_grid() {
    std::vector<double> grid{0.0};
    const double lo = std::log(1e-3), hi = std::log(1e3);
    for (int i = 0; i < 50; ++i)
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / 49.0));
    return grid;
}

namespace detail {

inline Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m,
                                   const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
    return out;
}
inline Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Eigen::Index>(r)) = v(rows[r]);
    return out;
}

inline double validation_mse(const Eigen::MatrixXd& theta_val, const Eigen::VectorXd& ut_val,
                             const Eigen::VectorXd& xi) {
    return (ut_val - theta_val * xi).squaredNorm() / static_cast<double>(ut_val.size());
}

/// Unregularized least squares restricted to `support`, fit on the training
/// rows; returns the full-length coefficient vector.
inline Eigen::VectorXd restricted_ls(const Eigen::MatrixXd& theta_train,
                                     const Eigen::VectorXd& ut_train,
                                     const std::vector<int>& support) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(theta_train.cols());
    if (support.empty()) return xi;
    Eigen::MatrixXd sub(theta_train.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t a = 0; a < support.size(); ++a)
        sub.col(static_cast<Eigen::Index>(a)) = theta_train.col(support[a]);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd beta = svd.solve(ut_train);
    for (std::size_t a = 0; a < support.size(); ++a)
        xi(support[a]) = beta(static_cast<Eigen::Index>(a));
    return xi;
}

}  // namespace detail

/**
 * Hyperparameter search: fit the greedy selector on the training rows for
 * every tolerance in the grid and keep the equation with the smallest
 * validation MSE. Ties go to the smaller support, then the smaller k.
 */
inline LearnedEquation select_hyperparameter(const Library& lib, const TileSplit& split,
                                             const std::vector<double>& k_grid) {
    if (k_grid.empty()) throw ConfigError("hyperparameter grid is empty");
    const Eigen::MatrixXd theta_tr = detail::gather_rows(lib.theta, split.train_rows);
    const Eigen::VectorXd ut_tr = detail::gather(lib.target, split.train_rows);
    const Eigen::MatrixXd theta_val = detail::gather_rows(lib.theta, split.val_rows);
    const Eigen::VectorXd ut_val = detail::gather(lib.target, split.val_rows);

    LearnedEquation best;
    double best_val = std::numeric_limits<double>::infinity();
    bool first = true;
    for (const double k : k_grid) {
        LearnedEquation eq = greedy_fit(theta_tr, ut_tr, k);
        const double val = detail::validation_mse(theta_val, ut_val, eq.xi);
        const bool better =
            first || val < best_val ||
            (val == best_val && (eq.support_size() < best.support_size() ||
                                 (eq.support_size() == best.support_size() && k < best.k)));
        if (better) {
            best = std::move(eq);
            best_val = val;
            first = false;
        }
    }
    best.val0 = best_val;
    best.split_seed = split.seed;
    return best;
}

/**
 * Post-selection sensitivity test: every supported term is dropped in turn,
 * the rest are refit on the training rows, and the term is deleted when the
 * validation MSE barely grows (val_i / val0 < 1 + alpha). Survivors get one
 * final unregularized refit. Deleting everything is a legitimate outcome and
 * yields the zero equation u_t = 0.
 */
inline LearnedEquation prune(const Library& lib, const TileSplit& split,
                             const LearnedEquation& eq, double alpha) {
    LearnedEquation out = eq;
    out.alpha = alpha;
    std::vector<int> support;
    for (Eigen::Index i = 0; i < eq.xi.size(); ++i)
        if (eq.xi(i) != 0.0) support.push_back(static_cast<int>(i));
    if (support.empty()) return out;

    const Eigen::MatrixXd theta_tr = detail::gather_rows(lib.theta, split.train_rows);
    const Eigen::VectorXd ut_tr = detail::gather(lib.target, split.train_rows);
    const Eigen::MatrixXd theta_val = detail::gather_rows(lib.theta, split.val_rows);
    const Eigen::VectorXd ut_val = detail::gather(lib.target, split.val_rows);

    const double val0 = eq.val0;
    std::vector<int> kept;
    for (std::size_t a = 0; a < support.size(); ++a) {
        std::vector<int> reduced = support;
        reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(a));
        const Eigen::VectorXd xi_i = detail::restricted_ls(theta_tr, ut_tr, reduced);
        const double val_i = detail::validation_mse(theta_val, ut_val, xi_i);
        const double ratio = val0 > 0.0
                                 ? val_i / val0
                                 : (val_i == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
        if (!(ratio < 1.0 + alpha)) kept.push_back(support[a]);
    }

    out.xi = detail::restricted_ls(theta_tr, ut_tr, kept);
    out.val0 = detail::validation_mse(theta_val, ut_val, out.xi);
    return out;
}

}  // namespace pdelearn
