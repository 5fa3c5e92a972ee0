#include <catch2/catch_amalgamated.hpp>
#include <cstdint>
#include <functional>

#include "pdelearn/bicubic.hpp"
#include "pdelearn/finite_difference.hpp"
#include "pdelearn/metrics.hpp"
#include "pdelearn/truth.hpp"

using namespace pdelearn;

namespace {

NoisyDataset dataset_from(const Grid& g, const std::function<double(double, double)>& f) {
    Eigen::MatrixXd vals(g.nx(), g.nt());
    for (std::size_t j = 0; j < g.nt(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            vals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                f(g.x()[i], g.t()[j]);
    Field clean(g, vals, "u");
    return NoisyDataset{clean, clean, ModelSpec{}, NoiseSpec{}, AffineScale{}};
}

}  // namespace

TEST_CASE("bicubic windows reproduce cubic surfaces exactly") {
    const Grid g = Grid::uniform(0.0, 1.0, 21, 0.0, 1.0, 21);
    const DerivativeBundle b = spline_bundle(
        dataset_from(g, [](double x, double t) { return x * x * x + t * t * t + x * t; }));
    for (std::size_t i = 0; i < g.nx(); ++i)
        for (std::size_t j = 0; j < g.nt(); ++j) {
            const double x = g.x()[i], t = g.t()[j];
            const auto ei = static_cast<Eigen::Index>(i);
            const auto ej = static_cast<Eigen::Index>(j);
            CHECK(b.u.values(ei, ej) ==
                  Catch::Approx(x * x * x + t * t * t + x * t).margin(1e-8));
            CHECK(b.u_x.values(ei, ej) == Catch::Approx(3.0 * x * x + t).margin(1e-8));
            CHECK(b.u_t.values(ei, ej) == Catch::Approx(3.0 * t * t + x).margin(1e-8));
            CHECK(b.u_xx.values(ei, ej) == Catch::Approx(6.0 * x).margin(1e-8));
        }
}

TEST_CASE("constant fields come back constant with zero derivatives") {
    const Grid g = Grid::uniform(0.0, 1.0, 15, 0.0, 1.0, 13);
    const double K = 0.37;
    const DerivativeBundle b = spline_bundle(dataset_from(g, [&](double, double) { return K; }));
    CHECK((b.u.values.array() - K).abs().maxCoeff() < 1e-10);
    CHECK(b.u_x.values.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(b.u_t.values.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(b.u_xx.values.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("shifting values by a constant shifts u and leaves derivatives alone") {
    const Grid g = Grid::uniform(0.0, 1.0, 13, 0.0, 1.0, 13);
    auto f = [](double x, double t) { return std::sin(3.0 * x) * std::cos(2.0 * t); };
    const DerivativeBundle base = spline_bundle(dataset_from(g, f));
    const DerivativeBundle shifted =
        spline_bundle(dataset_from(g, [&](double x, double t) { return f(x, t) + 5.0; }));
    CHECK((shifted.u.values.array() - base.u.values.array() - 5.0).abs().maxCoeff() < 1e-9);
    CHECK((shifted.u_x.values - base.u_x.values).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((shifted.u_xx.values - base.u_xx.values).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((shifted.u_t.values - base.u_t.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("spline u beats raw data under noise and loses to it when clean") {
    const ModelSpec spec = ModelSpec::fisher_kpp_preset();
    const Grid g = default_grid(spec.kind);
    const Field clean = solve_reaction_diffusion(spec, g);

    const NoisyDataset noiseless = add_noise(clean, NoiseSpec{0.0, 1.0, 0}, spec);
    const double spline_clean = rmse(spline_bundle(noiseless).u, clean);
    const double fd_clean = rmse(fd_bundle(noiseless).u, clean);
    CHECK(fd_clean == 0.0);       // FD passes the data through unchanged
    CHECK(spline_clean > fd_clean);
    CHECK(spline_clean < 1e-3);   // but the local fit bias stays tiny

    const NoisyDataset noisy = add_noise(clean, NoiseSpec{0.05, 1.0, 11}, spec);
    CHECK(rmse(spline_bundle(noisy).u, clean) < rmse(fd_bundle(noisy).u, clean));
}

TEST_CASE("spline smooths u at every preset and seed tried") {
    for (const ModelKind kind : {ModelKind::DiffusionAdvection, ModelKind::FisherKpp,
                                 ModelKind::NonlinearFisherKpp}) {
        const ModelSpec spec = ModelSpec::preset(kind);
        const Grid g = default_grid(kind);
        const Field clean = solve_model(spec, g);
        for (const double sigma : {0.01, 0.25})
            for (const std::uint64_t seed : {1ull, 2ull}) {
                const NoisyDataset ds = add_noise(clean, NoiseSpec{sigma, 1.0, seed}, spec);
                CHECK(rmse(spline_bundle(ds).u, clean) <= rmse(fd_bundle(ds).u, clean));
            }
    }
}

TEST_CASE("grids smaller than the window are refused") {
    const Grid g = Grid::uniform(0.0, 1.0, 10, 0.0, 1.0, 20);
    Eigen::MatrixXd vals = Eigen::MatrixXd::Zero(10, 20);
    Field f(g, vals, "u");
    const NoisyDataset ds{f, f, ModelSpec{}, NoiseSpec{}, AffineScale{}};
    CHECK_THROWS_AS(spline_bundle(ds), InsufficientPointsError);
}
