#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "pdelearn/bundle_io.hpp"
#include "pdelearn/dataset_io.hpp"
#include "pdelearn/equation_io.hpp"
#include "pdelearn/finite_difference.hpp"

using namespace pdelearn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("pdelearn_" + tag + "_" +
                                            std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("numbers round-trip through the shortest decimal form") {
    for (const double v : {0.1, -3.25e-17, 1.0 / 3.0, 9.04e4, 0.0, -0.0, 5e-324})
        CHECK(parse_double(fmt_double(v)) == v);
}

TEST_CASE("content hashing is stable and content-sensitive") {
    CHECK(fnv1a_hex("abc") == fnv1a_hex("abc"));
    CHECK(fnv1a_hex("abc") != fnv1a_hex("abd"));
    CHECK(fnv1a_hex("").size() == 16);
}

TEST_CASE("datasets survive a save/load round trip bit-exactly") {
    TempDir tmp("dataset_io");
    const ModelSpec spec = ModelSpec::fisher_kpp_preset();
    const Grid g = Grid::uniform(0.0, 1.0, 21, 0.0, 1.0, 11);
    const NoisyDataset ds = generate_dataset(spec, g, NoiseSpec{0.05, 1.0, 99});
    save_dataset(ds, tmp.path.string());
    const NoisyDataset back = load_dataset(tmp.path.string());

    CHECK(back.observed.values == ds.observed.values);
    CHECK(back.clean.values == ds.clean.values);
    CHECK(back.observed.grid.x() == ds.observed.grid.x());
    CHECK(back.model.kind == spec.kind);
    CHECK(back.model.diffusion == spec.diffusion);
    CHECK(back.model.growth == spec.growth);
    CHECK(back.noise.sigma == 0.05);
    CHECK(back.noise.seed == 99);
    CHECK(back.scale.is_identity());
}

TEST_CASE("bundles round-trip and refuse stale datasets") {
    TempDir tmp("bundle_io");
    const ModelSpec spec = ModelSpec::fisher_kpp_preset();
    const Grid g = Grid::uniform(0.0, 1.0, 15, 0.0, 1.0, 12);
    const NoisyDataset ds = generate_dataset(spec, g, NoiseSpec{0.01, 1.0, 3});
    save_dataset(ds, tmp.path.string());
    const std::string hash = hash_file((tmp.path / "dataset.csv").string());

    const DerivativeBundle bundle = fd_bundle(ds);
    save_bundle(bundle, tmp.path.string(), hash);
    const DerivativeBundle back = load_bundle(tmp.path.string(), DenoiseMethod::FD);
    CHECK(back.u.values == bundle.u.values);
    CHECK(back.u_t.values == bundle.u_t.values);
    CHECK(back.u_x.values == bundle.u_x.values);
    CHECK(back.u_xx.values == bundle.u_xx.values);

    // Regenerating the dataset with another seed invalidates the bundle.
    save_dataset(generate_dataset(spec, g, NoiseSpec{0.01, 1.0, 4}), tmp.path.string());
    CHECK_THROWS_AS(load_bundle(tmp.path.string(), DenoiseMethod::FD), StaleArtifactError);

    CHECK_THROWS_AS(load_bundle(tmp.path.string(), DenoiseMethod::Spline), IoError);
}

TEST_CASE("learned equations serialize and render") {
    LearnedEquation eq;
    eq.labels = term_labels();
    eq.xi = Eigen::VectorXd::Zero(12);
    eq.xi(3) = -0.8;
    eq.xi(6) = 0.01;
    eq.val0 = 1.5e-7;
    eq.k = 0.046;
    eq.alpha = 0.25;
    eq.method = "ann";
    eq.sigma = 0.05;
    eq.split_seed = 1234;

    CHECK(render_equation(eq) == "u_t = -0.8*u_x + 0.01*u_xx");

    const LearnedEquation back = equation_from_json(equation_to_json(eq));
    CHECK(back.xi == eq.xi);
    CHECK(back.val0 == eq.val0);
    CHECK(back.k == eq.k);
    CHECK(back.method == "ann");
    CHECK(back.split_seed == 1234);
    CHECK(back.support() == eq.support());

    LearnedEquation zero;
    zero.labels = term_labels();
    zero.xi = Eigen::VectorXd::Zero(12);
    CHECK(render_equation(zero) == "u_t = 0");
}
