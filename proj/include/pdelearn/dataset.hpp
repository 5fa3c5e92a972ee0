#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "pdelearn/errors.hpp"
#include "pdelearn/grid.hpp"
#include "pdelearn/models.hpp"
#include "pdelearn/rng.hpp"

namespace pdelearn {

/// Proportional-error noise: U = u + sigma * u^gamma * eps, eps ~ N(0,1) iid.
struct NoiseSpec {
    double sigma = 0.0;
    double gamma = 1.0;
    std::uint64_t seed = 0;
};

/// Affine map v -> (v - lo) / (hi - lo). Identity when (lo, hi) = (0, 1).
struct AffineScale {
    double lo = 0.0;
    double hi = 1.0;

    double apply(double v) const { return (v - lo) / (hi - lo); }
    double invert(double v) const { return lo + (hi - lo) * v; }
    double span() const { return hi - lo; }
    bool is_identity() const { return lo == 0.0 && hi == 1.0; }
};

struct NoisyDataset {
    Field clean;
    Field observed;
    ModelSpec model;
    NoiseSpec noise;
    AffineScale scale;  // maps observed values back: original = invert(observed)
};

/// Corrupts a clean field with seeded proportional-error noise.
inline NoisyDataset add_noise(const Field& clean, const NoiseSpec& noise,
                              const ModelSpec& model = {}) {
    if (!clean.all_finite()) throw Error("add_noise requires a finite clean field");
    Field observed = clean;
    observed.label = "u_observed";
    if (noise.sigma > 0.0) {
        Rng rng(noise.seed);
        for (Eigen::Index j = 0; j < observed.values.cols(); ++j)
            for (Eigen::Index i = 0; i < observed.values.rows(); ++i) {
                const double u = clean.values(i, j);
                const double w = noise.sigma * std::pow(std::abs(u), noise.gamma) *
                                 (u < 0.0 ? -1.0 : 1.0);
                observed.values(i, j) = u + w * rng.normal();
            }
    }
    return NoisyDataset{clean, std::move(observed), model, noise, AffineScale{}};
}

/// Solve the model on the grid and corrupt the solution.
inline NoisyDataset generate_dataset(const ModelSpec& spec, const Grid& grid,
                                     const NoiseSpec& noise, double dt_internal = 0.0) {
    return add_noise(solve_model(spec, grid, dt_internal), noise, spec);
}

/**
 * Maps the observed values onto [0,1] and records the affine scale so later
 * stages can restore original units. A constant field is left unchanged with
 * an identity scale. The clean field is mapped with the same scale so that
 * observed == clean is preserved at sigma = 0.
 */
inline NoisyDataset rescale_unit(const NoisyDataset& ds) {
    const double lo = ds.observed.values.minCoeff();
    const double hi = ds.observed.values.maxCoeff();
    if (!(hi > lo)) return ds;

    NoisyDataset out = ds;
    out.scale = AffineScale{lo, hi};
    out.observed.values = (ds.observed.values.array() - lo) / (hi - lo);
    out.clean.values = (ds.clean.values.array() - lo) / (hi - lo);
    return out;
}

}  // namespace pdelearn
