#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pdelearn/errors.hpp"
#include "pdelearn/grid.hpp"

namespace pdelearn {

enum class ModelKind { DiffusionAdvection, FisherKpp, NonlinearFisherKpp };

inline std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::DiffusionAdvection: return "diffusion_advection";
        case ModelKind::FisherKpp: return "fisher_kpp";
        case ModelKind::NonlinearFisherKpp: return "nonlinear_fisher_kpp";
    }
    return "unknown";
}

inline ModelKind parse_model_kind(const std::string& s) {
    if (s == "diffusion_advection") return ModelKind::DiffusionAdvection;
    if (s == "fisher_kpp") return ModelKind::FisherKpp;
    if (s == "nonlinear_fisher_kpp") return ModelKind::NonlinearFisherKpp;
    throw ConfigError("unknown model kind: " + s);
}

struct InitialCondition {
    enum class Profile { Gaussian, Uniform };

    Profile profile = Profile::Gaussian;
    double center = 0.0;
    double width = 0.05;
    double amplitude = 1.0;

    static InitialCondition gaussian(double center, double width, double amplitude = 1.0) {
        return {Profile::Gaussian, center, width, amplitude};
    }
    static InitialCondition uniform(double value) {
        return {Profile::Uniform, 0.0, 0.0, value};
    }

    double evaluate(double x) const {
        if (profile == Profile::Uniform) return amplitude;
        const double z = (x - center) / width;
        return amplitude * std::exp(-0.5 * z * z);
    }
};

/**
 * One of the three transport models together with its coefficients and
 * initial profile:
 *
 *   diffusion_advection:    u_t = -c u_x + D u_xx
 *   fisher_kpp:             u_t = D u_xx + r u - r u^2
 *   nonlinear_fisher_kpp:   u_t = d/dx(D u u_x) + r u - r u^2
 *                                = D u u_xx + D u_x^2 + r u - r u^2
 */
struct ModelSpec {
    ModelKind kind = ModelKind::DiffusionAdvection;
    double diffusion = 0.01;   // D
    double advection = 0.0;    // c (diffusion_advection only)
    double growth = 0.0;       // r (Fisher models only)
    InitialCondition ic;

    void validate() const {
        if (!(diffusion > 0.0)) throw ConfigError("model requires D > 0");
        if (kind != ModelKind::DiffusionAdvection && !(growth > 0.0))
            throw ConfigError("reaction model requires r > 0");
    }

    static ModelSpec diffusion_advection_preset() {
        ModelSpec m;
        m.kind = ModelKind::DiffusionAdvection;
        m.diffusion = 0.01;
        m.advection = 0.8;
        m.growth = 0.0;
        m.ic = InitialCondition::gaussian(0.2, 0.05);
        return m;
    }
    static ModelSpec fisher_kpp_preset() {
        ModelSpec m;
        m.kind = ModelKind::FisherKpp;
        m.diffusion = 0.02;
        m.advection = 0.0;
        m.growth = 10.0;
        m.ic = InitialCondition::gaussian(0.0, 0.05);
        return m;
    }
    static ModelSpec nonlinear_fisher_kpp_preset() {
        ModelSpec m = fisher_kpp_preset();
        m.kind = ModelKind::NonlinearFisherKpp;
        return m;
    }
    static ModelSpec preset(ModelKind k) {
        switch (k) {
            case ModelKind::DiffusionAdvection: return diffusion_advection_preset();
            case ModelKind::FisherKpp: return fisher_kpp_preset();
            case ModelKind::NonlinearFisherKpp: return nonlinear_fisher_kpp_preset();
        }
        throw ConfigError("bad model kind");
    }
};

/// Sampling lattice used for each model's data sets: 101x300 for the
/// diffusion-advection equation, 199x99 for the Fisher models.
inline Grid default_grid(ModelKind kind) {
    if (kind == ModelKind::DiffusionAdvection) return Grid::uniform(0.0, 1.0, 101, 0.0, 1.0, 300);
    return Grid::uniform(0.0, 1.0, 199, 0.0, 1.0, 99);
}

/**
 * Closed-form solution of u_t = -c u_x + D u_xx for a Gaussian initial
 * profile on an unbounded domain: the pulse advects at rate c while its
 * variance grows as s0^2 + 2Dt.
 */
inline Field solve_diffusion_advection(const ModelSpec& spec, const Grid& grid) {
    if (spec.kind != ModelKind::DiffusionAdvection)
        throw ConfigError("solve_diffusion_advection requires a diffusion_advection spec");
    if (spec.ic.profile != InitialCondition::Profile::Gaussian)
        throw ConfigError("analytic diffusion-advection solution supports only a Gaussian "
                          "initial condition");
    spec.validate();

    const double s0sq = spec.ic.width * spec.ic.width;
    Field out = Field::zeros(grid, "u");
    for (std::size_t j = 0; j < grid.nt(); ++j) {
        const double tau = grid.t()[j] - grid.t().front();
        const double var = s0sq + 2.0 * spec.diffusion * tau;
        const double amp = spec.ic.amplitude * std::sqrt(s0sq / var);
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double xi = grid.x()[i] - spec.ic.center - spec.advection * tau;
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                amp * std::exp(-0.5 * xi * xi / var);
        }
    }
    return out;
}

namespace detail {

/// Right-hand side of the method-of-lines system, with zero-flux ends.
inline void reaction_diffusion_rhs(const ModelSpec& spec, double inv_dx,
                                   const Eigen::VectorXd& u, Eigen::VectorXd& dudt) {
    const Eigen::Index m = u.size();
    const double d = spec.diffusion;
    const double r = spec.growth;
    const double inv_dx2 = inv_dx * inv_dx;

    if (spec.kind == ModelKind::FisherKpp) {
        dudt(0) = 2.0 * (u(1) - u(0)) * inv_dx2 * d;
        dudt(m - 1) = 2.0 * (u(m - 2) - u(m - 1)) * inv_dx2 * d;
        for (Eigen::Index i = 1; i < m - 1; ++i)
            dudt(i) = d * (u(i + 1) - 2.0 * u(i) + u(i - 1)) * inv_dx2;
    } else {
        // Conservative flux d/dx(D u u_x); F(i+1/2) = D * (u_i+u_{i+1})/2 * (u_{i+1}-u_i)/dx,
        // with F = 0 at both ends.
        double flux_left = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            double flux_right = 0.0;
            if (i < m - 1)
                flux_right = d * 0.5 * (u(i) + u(i + 1)) * (u(i + 1) - u(i)) * inv_dx;
            dudt(i) = (flux_right - flux_left) * inv_dx;
            flux_left = flux_right;
        }
    }
    for (Eigen::Index i = 0; i < m; ++i) dudt(i) += r * u(i) * (1.0 - u(i));
}

}  // namespace detail

/// Largest internal explicit step considered safe for the given model/grid.
inline double stable_time_step(const ModelSpec& spec, const Grid& grid) {
    return 0.4 * grid.dx() * grid.dx() / spec.diffusion;
}

/**
 * Method-of-lines solution of the Fisher models: second-order central
 * differences in space, explicit Euler in time, zero-flux boundaries.
 * The state is advanced at dt_internal (default stable_time_step) and
 * sampled onto grid.t.
 */
inline Field solve_reaction_diffusion(const ModelSpec& spec, const Grid& grid,
                                      double dt_internal = 0.0) {
    if (spec.kind == ModelKind::DiffusionAdvection)
        throw ConfigError("solve_reaction_diffusion requires a Fisher model spec");
    spec.validate();
    if (dt_internal <= 0.0) dt_internal = stable_time_step(spec, grid);
    const double bound = 0.5 * grid.dx() * grid.dx() / spec.diffusion;
    if (dt_internal > bound * (1.0 + 1e-12))
        throw StabilityError("dt_internal " + std::to_string(dt_internal) +
                             " exceeds explicit stability bound " + std::to_string(bound));

    const Eigen::Index m = static_cast<Eigen::Index>(grid.nx());
    Eigen::VectorXd u(m), dudt(m);
    for (Eigen::Index i = 0; i < m; ++i) u(i) = spec.ic.evaluate(grid.x()[static_cast<std::size_t>(i)]);

    Field out = Field::zeros(grid, "u");
    out.values.col(0) = u;
    const double inv_dx = 1.0 / grid.dx();
    std::size_t global_step = 0;
    for (std::size_t j = 1; j < grid.nt(); ++j) {
        const double span = grid.t()[j] - grid.t()[j - 1];
        const auto steps = static_cast<std::size_t>(std::ceil(span / dt_internal - 1e-12));
        const double dt = span / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s, ++global_step) {
            detail::reaction_diffusion_rhs(spec, inv_dx, u, dudt);
            u += dt * dudt;
            if (!u.allFinite())
                throw DivergenceError("reaction-diffusion state became non-finite", global_step);
        }
        out.values.col(static_cast<Eigen::Index>(j)) = u;
    }
    return out;
}

/// Forward solve for any model kind.
inline Field solve_model(const ModelSpec& spec, const Grid& grid, double dt_internal = 0.0) {
    if (spec.kind == ModelKind::DiffusionAdvection) return solve_diffusion_advection(spec, grid);
    return solve_reaction_diffusion(spec, grid, dt_internal);
}

}  // namespace pdelearn
