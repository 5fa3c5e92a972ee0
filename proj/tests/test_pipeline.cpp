#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "pdelearn/experiment.hpp"

using namespace pdelearn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("pdelearn_" + tag + "_" +
                                            std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig small_config(const std::string& out) {
    ExperimentConfig cfg;
    cfg.models = {"diffusion_advection"};
    cfg.sigmas = {0.0};
    cfg.methods = {"fd"};
    cfg.splits = 10;
    cfg.master_seed = 7;
    cfg.output_dir = out;
    cfg.workers = 2;
    return cfg;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PDELEARN_CLI_PATH) + " " + args + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg = small_config("x");
    cfg.methods = {};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config("x");
    cfg.sigmas = {-0.1};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config("x");
    cfg.splits = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config("x");
    cfg.models = {"heat"};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config json round trip keeps every field") {
    ExperimentConfig cfg = small_config("some/dir");
    cfg.sigmas = {0.0, 0.25};
    cfg.alpha = 0.1;
    cfg.pruning = false;
    cfg.ann_hidden = 77;
    const ExperimentConfig back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("fd experiment on clean diffusion-advection recovers the equation") {
    TempDir tmp("exp_fd");
    const ExperimentConfig cfg = small_config(tmp.path.string());
    run_experiment(cfg);

    CHECK(fs::exists(tmp.path / "rmse.csv"));
    CHECK(fs::exists(tmp.path / "tpr.csv"));
    CHECK(fs::exists(tmp.path / "equations.json"));
    CHECK(fs::exists(tmp.path / "config.lock"));

    const auto equations =
        nlohmann::json::parse(read_file((tmp.path / "equations.json").string()));
    REQUIRE(equations.size() == 1);
    const auto modal = equations[0].at("modal");
    const auto support = modal.at("modal_support").get<std::vector<std::string>>();
    const std::set<std::string> s(support.begin(), support.end());
    CHECK(s.count("u_x") == 1);
    CHECK(s.count("u_xx") == 1);
    const auto coeffs = modal.at("mean_coefficients").get<std::map<std::string, double>>();
    CHECK(coeffs.at("u_x") == Catch::Approx(-0.8).epsilon(0.05));
    CHECK(coeffs.at("u_xx") == Catch::Approx(0.01).epsilon(0.05));
}

TEST_CASE("identical configs give byte-identical reports") {
    TempDir a("exp_det_a"), b("exp_det_b");
    ExperimentConfig ca = small_config(a.path.string());
    ExperimentConfig cb = small_config(b.path.string());
    ca.sigmas = cb.sigmas = {0.05};
    ca.methods = cb.methods = {"fd", "spline"};
    run_experiment(ca);
    run_experiment(cb);
    for (const char* name : {"rmse.csv", "tpr.csv", "equations.json"})
        CHECK(read_file((a.path / name).string()) == read_file((b.path / name).string()));
}

TEST_CASE("stagewise execution equals the end-to-end run byte for byte") {
    TempDir e2e("exp_whole"), staged("exp_staged");
    ExperimentConfig cfg = small_config(e2e.path.string());
    cfg.sigmas = {0.05};
    cfg.methods = {"fd", "spline"};
    run_experiment(cfg);

    ExperimentConfig cfg2 = cfg;
    cfg2.output_dir = staged.path.string();
    const nlohmann::json lock = write_config_lock(cfg2);
    for (const auto& run : lock.at("runs")) {
        const std::string dir = run.at("dir").get<std::string>();
        const ModelKind kind = parse_model_kind(run.at("model").get<std::string>());
        stage_generate(ModelSpec::preset(kind), default_grid(kind),
                       NoiseSpec{run.at("sigma").get<double>(), 1.0,
                                 run.at("dataset_seed").get<std::uint64_t>()},
                       dir);
        for (const auto& m : cfg2.methods) {
            stage_denoise(dir, parse_denoise_method(m),
                          cfg2.train_config(run.at("ann_seed").get<std::uint64_t>()));
            LearnOptions lo;
            lo.splits = cfg2.splits;
            lo.alpha = cfg2.alpha;
            lo.prune = cfg2.pruning;
            lo.seed_base = run.at("learn_seeds").at(m).get<std::uint64_t>();
            lo.workers = 1;  // worker count must not affect results
            stage_learn(dir, parse_denoise_method(m), lo);
        }
    }
    stage_report(cfg2.output_dir);

    for (const char* name : {"rmse.csv", "tpr.csv", "equations.json"})
        CHECK(read_file((e2e.path / name).string()) == read_file((staged.path / name).string()));
    const std::string rel = "diffusion_advection/sigma_0.05";
    for (const char* name : {"dataset.csv", "bundle_fd.csv", "bundle_spline.csv",
                             "tpr_fd.csv", "tpr_spline.csv", "learned_fd.json"})
        CHECK(read_file((e2e.path / rel / name).string()) ==
              read_file((staged.path / rel / name).string()));
}

TEST_CASE("cli stages run end to end") {
    TempDir tmp("cli_stages");
    const std::string dir = (tmp.path / "ds").string();
    REQUIRE(run_cli("generate --model fisher_kpp --sigma 0.01 --seed 5 --out " + dir) == 0);
    CHECK(fs::exists(fs::path(dir) / "dataset.csv"));
    CHECK(fs::exists(fs::path(dir) / "dataset.json"));

    REQUIRE(run_cli("denoise --data " + dir + " --method fd") == 0);
    CHECK(fs::exists(fs::path(dir) / "bundle_fd.csv"));

    REQUIRE(run_cli("learn --data " + dir + " --method fd --splits 3 --seed 11") == 0);
    CHECK(fs::exists(fs::path(dir) / "learned_fd.json"));
    CHECK(fs::exists(fs::path(dir) / "tpr_fd.csv"));

    // A tiny surrogate exercises the checkpoint cache path.
    const std::string ann_args = " --method ann --hidden 8 --batch 128 --patience 2 "
                                 "--max-epochs 4 --ann-seed 3";
    REQUIRE(run_cli("denoise --data " + dir + ann_args) == 0);
    CHECK(fs::exists(fs::path(dir) / "ann_checkpoint.bin"));
    const auto first_bundle = read_file((fs::path(dir) / "bundle_ann.csv").string());
    REQUIRE(run_cli("denoise --data " + dir + ann_args) == 0);  // cache hit
    CHECK(read_file((fs::path(dir) / "bundle_ann.csv").string()) == first_bundle);

    // Refusal on stale artifacts: regenerate the dataset, then learn.
    REQUIRE(run_cli("generate --model fisher_kpp --sigma 0.01 --seed 6 --out " + dir) == 0);
    CHECK(run_cli("learn --data " + dir + " --method fd --splits 3 --seed 11") == 3);
}

TEST_CASE("cli rejects an empty method list") {
    TempDir tmp("cli_cfg");
    const std::string cfg_path = (tmp.path / "bad.json").string();
    std::ofstream(cfg_path) << R"({"methods": [], "output_dir": ")"
                            << (tmp.path / "out").string() << R"("})";
    CHECK(run_cli("experiment --config " + cfg_path) == 2);
}

TEST_CASE("no-prune runs are flagged and differ from pruned runs") {
    TempDir tmp("exp_noprune");
    ExperimentConfig cfg = small_config((tmp.path / "a").string());
    cfg.splits = 6;
    run_experiment(cfg);
    ExperimentConfig cfg2 = cfg;
    cfg2.output_dir = (tmp.path / "b").string();
    cfg2.pruning = false;
    run_experiment(cfg2);

    const auto pruned =
        nlohmann::json::parse(read_file((fs::path(cfg.output_dir) / "equations.json").string()));
    const auto unpruned =
        nlohmann::json::parse(read_file((fs::path(cfg2.output_dir) / "equations.json").string()));
    CHECK(pruned[0].at("pruning").get<bool>());
    CHECK_FALSE(unpruned[0].at("pruning").get<bool>());
}
