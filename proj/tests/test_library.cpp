#include <catch2/catch_amalgamated.hpp>

#include "pdelearn/term_library.hpp"
#include "pdelearn/truth.hpp"

using namespace pdelearn;

namespace {

DerivativeBundle constant_bundle(const Grid& g, double u, double ux, double uxx, double ut) {
    auto fill = [&](double v, const char* label) {
        return Field(g,
                     Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(g.nx()),
                                               static_cast<Eigen::Index>(g.nt()), v),
                     label);
    };
    return DerivativeBundle{fill(u, "u"), fill(ut, "u_t"), fill(ux, "u_x"), fill(uxx, "u_xx"),
                            DenoiseMethod::FD};
}

}  // namespace

TEST_CASE("diffusion-advection subsampling keeps 56 timepoints") {
    const Grid g = default_grid(ModelKind::DiffusionAdvection);  // 101 x 300
    const DerivativeBundle b = constant_bundle(g, 0, 0, 0, 0);
    const Library lib = build_library(b, default_subsample(ModelKind::DiffusionAdvection));
    CHECK(lib.retained_nt() == 56);
    CHECK(lib.rows() == 101 * 56);
    CHECK(lib.retained_times.front() == 20);
    CHECK(lib.retained_times.back() == 295);
}

TEST_CASE("no subsampling keeps every point") {
    const Grid g = Grid::uniform(0.0, 1.0, 7, 0.0, 1.0, 9);
    const Library lib = build_library(constant_bundle(g, 1, 2, 3, 4), SubsampleOptions{0, 1});
    CHECK(lib.rows() == 63);
    CHECK(lib.retained_nt() == 9);
}

TEST_CASE("zero field produces the lone constant column") {
    const Grid g = Grid::uniform(0.0, 1.0, 5, 0.0, 1.0, 5);
    const Library lib = build_library(constant_bundle(g, 0, 0, 0, 0));
    CHECK(lib.theta.col(0).isOnes());
    CHECK(lib.theta.rightCols(11).isZero());
}

TEST_CASE("hand-evaluated term products") {
    const Grid g = Grid::uniform(0.0, 1.0, 3, 0.0, 1.0, 3);
    const Library lib = build_library(constant_bundle(g, 2.0, 3.0, 0.0, 0.0));
    Eigen::VectorXd expected(12);
    expected << 1, 2, 4, 3, 6, 12, 0, 0, 0, 9, 0, 0;
    CHECK((lib.theta.row(0).transpose() - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("product columns are exact products of their factors") {
    const ModelSpec spec = ModelSpec::diffusion_advection_preset();
    const Grid g = Grid::uniform(0.0, 1.0, 31, 0.0, 1.0, 21);
    const Library lib = build_library(analytic_diffusion_advection_bundle(spec, g));
    const auto col = [&](const char* label) {
        for (std::size_t i = 0; i < lib.labels.size(); ++i)
            if (lib.labels[i] == label) return lib.theta.col(static_cast<Eigen::Index>(i));
        throw std::runtime_error("label");
    };
    CHECK((col("u*u_x").array() - col("u").array() * col("u_x").array()).abs().maxCoeff() == 0.0);
    CHECK((col("u^2*u_xx").array() - col("u^2").array() * col("u_xx").array()).abs().maxCoeff() ==
          0.0);
    CHECK((col("u_x*u_xx").array() - col("u_x").array() * col("u_xx").array()).abs().maxCoeff() ==
          0.0);
    CHECK((col("u_xx^2").array() - col("u_xx").array().square()).abs().maxCoeff() == 0.0);
}

TEST_CASE("point_index maps every row into the grid") {
    const Grid g = Grid::uniform(0.0, 1.0, 6, 0.0, 1.0, 14);
    const Library lib = build_library(constant_bundle(g, 1, 1, 1, 1), SubsampleOptions{3, 4});
    CHECK(lib.retained_times == std::vector<std::size_t>{3, 7, 11});
    for (std::size_t r = 0; r < lib.rows(); ++r) {
        const auto [i, j] = lib.point_index[r];
        CHECK(i < g.nx());
        CHECK(j < g.nt());
        CHECK(i == r % lib.nx);
    }
}

TEST_CASE("subsampling every timepoint away is an error") {
    const Grid g = Grid::uniform(0.0, 1.0, 5, 0.0, 1.0, 5);
    CHECK_THROWS_AS(build_library(constant_bundle(g, 1, 1, 1, 1), SubsampleOptions{5, 1}),
                    Error);
}
