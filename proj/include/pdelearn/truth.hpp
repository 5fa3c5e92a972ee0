#pragma once

#include <cmath>

#include "pdelearn/derivative_bundle.hpp"
#include "pdelearn/finite_difference.hpp"
#include "pdelearn/models.hpp"

namespace pdelearn {

/// Exact u, u_t, u_x, u_xx of the advected-spreading Gaussian. u_t is taken
/// from the equation itself (u_t = -c u_x + D u_xx), which is exact.
inline DerivativeBundle analytic_diffusion_advection_bundle(const ModelSpec& spec,
                                                            const Grid& grid) {
    if (spec.kind != ModelKind::DiffusionAdvection)
        throw ConfigError("analytic bundle is only available for diffusion_advection");
    Field u = solve_diffusion_advection(spec, grid);
    Field ut = Field::zeros(grid, "u_t");
    Field ux = Field::zeros(grid, "u_x");
    Field uxx = Field::zeros(grid, "u_xx");

    const double s0sq = spec.ic.width * spec.ic.width;
    for (std::size_t j = 0; j < grid.nt(); ++j) {
        const double tau = grid.t()[j] - grid.t().front();
        const double var = s0sq + 2.0 * spec.diffusion * tau;
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const auto ei = static_cast<Eigen::Index>(i);
            const auto ej = static_cast<Eigen::Index>(j);
            const double xi = grid.x()[i] - spec.ic.center - spec.advection * tau;
            const double val = u.values(ei, ej);
            ux.values(ei, ej) = -val * xi / var;
            uxx.values(ei, ej) = val * (xi * xi - var) / (var * var);
            ut.values(ei, ej) =
                spec.diffusion * uxx.values(ei, ej) - spec.advection * ux.values(ei, ej);
        }
    }
    return DerivativeBundle{std::move(u), std::move(ut), std::move(ux), std::move(uxx),
                            DenoiseMethod::Analytic};
}

/**
 * Reference fields used to score denoised bundles. The diffusion-advection
 * model has exact derivatives; the Fisher models have none, so the reference
 * is the finite-difference bundle of the noiseless solution.
 */
inline DerivativeBundle truth_bundle(const ModelSpec& spec, const Grid& grid,
                                     double dt_internal = 0.0) {
    if (spec.kind == ModelKind::DiffusionAdvection)
        return analytic_diffusion_advection_bundle(spec, grid);
    Field clean = solve_reaction_diffusion(spec, grid, dt_internal);
    return fd_bundle(add_noise(clean, NoiseSpec{0.0, 1.0, 0}, spec));
}

/// Same, but reusing the dataset's stored noiseless field instead of
/// re-solving. The dataset must be in original (unscaled) units.
inline DerivativeBundle truth_bundle_for(const NoisyDataset& ds) {
    if (ds.model.kind == ModelKind::DiffusionAdvection)
        return analytic_diffusion_advection_bundle(ds.model, ds.clean.grid);
    return fd_bundle(NoisyDataset{ds.clean, ds.clean, ds.model, NoiseSpec{0.0, 1.0, 0},
                                  AffineScale{}});
}

}  // namespace pdelearn
