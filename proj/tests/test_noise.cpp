#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "pdelearn/dataset.hpp"

using namespace pdelearn;

namespace {

Field constant_field(double value, std::size_t nx, std::size_t nt) {
    const Grid g = Grid::uniform(0.0, 1.0, nx, 0.0, 1.0, nt);
    return Field(g, Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(nx),
                                              static_cast<Eigen::Index>(nt), value),
                 "u");
}

}  // namespace

TEST_CASE("sigma = 0 leaves observations identical to the clean field") {
    const Field clean = constant_field(0.7, 5, 7);
    const NoisyDataset ds = add_noise(clean, NoiseSpec{0.0, 1.0, 123});
    CHECK(ds.observed.values == clean.values);
}

TEST_CASE("noise is deterministic per seed") {
    const Field clean = constant_field(2.0, 9, 9);
    const NoisyDataset a = add_noise(clean, NoiseSpec{0.1, 1.0, 42});
    const NoisyDataset b = add_noise(clean, NoiseSpec{0.1, 1.0, 42});
    const NoisyDataset c = add_noise(clean, NoiseSpec{0.1, 1.0, 43});
    CHECK(a.observed.values == b.observed.values);
    CHECK(a.observed.values != c.observed.values);
}

TEST_CASE("proportional noise has the right spread") {
    // 1e5 samples of K + 0.1*K*eps: sample std must land within 2% of 0.1*K.
    const double K = 3.0;
    const Field clean = constant_field(K, 100, 1000);
    const NoisyDataset ds = add_noise(clean, NoiseSpec{0.1, 1.0, 7});
    const Eigen::ArrayXXd err = (ds.observed.values - ds.clean.values).array();
    const double mean = err.mean();
    const double sd = std::sqrt((err - mean).square().mean());
    CHECK(sd == Catch::Approx(0.1 * K).epsilon(0.02));
}

TEST_CASE("noise is unbiased at every probed grid point") {
    const double K = 2.0;
    const double sigma = 0.2;
    const std::size_t replicates = 10000;
    const Field clean = constant_field(K, 3, 3);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(3, 3);
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        const NoisyDataset ds = add_noise(clean, NoiseSpec{sigma, 1.0, 1000 + rep});
        sum += ds.observed.values - ds.clean.values;
    }
    const double stderr_bound = 3.0 * sigma * K / std::sqrt(static_cast<double>(replicates));
    CHECK((sum / static_cast<double>(replicates)).cwiseAbs().maxCoeff() < stderr_bound);
}

TEST_CASE("rescale maps the observed range onto [0,1] and round-trips") {
    const Grid g = Grid::uniform(0.0, 1.0, 3, 0.0, 1.0, 3);
    Eigen::MatrixXd vals(3, 3);
    vals << 2.0, 2.5, 3.0, 3.5, 4.0, 2.2, 2.8, 3.3, 3.9;
    NoisyDataset ds{Field(g, vals, "u"), Field(g, vals, "u_observed"), ModelSpec{},
                    NoiseSpec{}, AffineScale{}};
    const NoisyDataset scaled = rescale_unit(ds);
    CHECK(scaled.scale.lo == 2.0);
    CHECK(scaled.scale.hi == 4.0);
    CHECK(scaled.observed.values.minCoeff() == 0.0);
    CHECK(scaled.observed.values.maxCoeff() == 1.0);
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        CHECK(scaled.scale.invert(scaled.observed.values(i)) ==
              Catch::Approx(vals(i)).margin(1e-12));
}

TEST_CASE("rescaling a constant field is the identity") {
    const Field clean = constant_field(0.4, 4, 4);
    const NoisyDataset ds = add_noise(clean, NoiseSpec{});
    const NoisyDataset scaled = rescale_unit(ds);
    CHECK(scaled.scale.is_identity());
    CHECK(scaled.observed.values == ds.observed.values);
}
