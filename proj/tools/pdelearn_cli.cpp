// Batch CLI for the PDE-learning pipeline. Stages can be run separately
// (generate -> denoise -> learn -> refine -> report) or end to end via the
// experiment subcommand; both paths produce byte-identical artifacts for the
// same configuration and master seed.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdelearn/experiment.hpp"
#include "pdelearn/pdelearn.hpp"

namespace {

using namespace pdelearn;

int cmd_generate(const std::string& model, double sigma, std::uint64_t seed,
                 const std::string& out_dir) {
    const ModelKind kind = parse_model_kind(model);
    const ModelSpec spec = ModelSpec::preset(kind);
    const Grid grid = default_grid(kind);
    stage_generate(spec, grid, NoiseSpec{sigma, 1.0, seed}, out_dir);
    std::cerr << "wrote dataset to " << out_dir << " (model=" << model
              << ", sigma=" << sigma << ", seed=" << seed << ")\n";
    return 0;
}

int cmd_denoise(const std::string& dir, const std::string& method, const TrainConfig& ann_cfg) {
    const DenoiseOutcome out = stage_denoise(dir, parse_denoise_method(method), ann_cfg);
    std::cerr << "wrote " << bundle_csv_name(out.bundle.method) << " in " << dir
              << (out.reused_checkpoint ? " (reused cached checkpoint)" : "") << "\n";
    return 0;
}

int cmd_learn(const std::string& dir, const std::string& method, const LearnOptions& opts) {
    const LearnOutcome out = stage_learn(dir, parse_denoise_method(method), opts);
    std::cerr << "learned over " << out.runs.size() << " splits (alpha=" << out.alpha
              << (opts.prune ? "" : ", pruning disabled") << "); modal equation: ";
    LearnedEquation modal;
    modal.labels = term_labels();
    modal.xi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kNumTerms));
    for (const auto& [term, coeff] : out.summary.mean_coefficients)
        modal.xi(detail::term_index(term)) = coeff;
    std::cerr << render_equation(modal) << "  [median TPR "
              << out.summary.tpr_distribution.median << "]\n";
    return 0;
}

int cmd_refine(const std::string& dir, const std::string& method, double gamma) {
    const RefineOutcome out = stage_refine(dir, parse_denoise_method(method), gamma);
    std::cerr << "refined: " << render_equation(out.equation) << " (cost "
              << out.fit.initial_cost << " -> " << out.fit.cost << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn PDEs from noisy spatiotemporal data"};
    app.require_subcommand(1);

    // generate
    std::string model = "diffusion_advection";
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    auto* generate = app.add_subcommand("generate", "Solve a model preset and add noise");
    generate->add_option("--model", model, "diffusion_advection | fisher_kpp | nonlinear_fisher_kpp");
    generate->add_option("--sigma", sigma, "proportional noise level");
    generate->add_option("--seed", seed, "noise RNG seed");
    generate->add_option("--out", out_dir, "dataset directory")->required();

    // denoise
    std::string data_dir;
    std::string method = "fd";
    ExperimentConfig ann_defaults;
    std::uint64_t ann_seed = 0;
    auto* denoise = app.add_subcommand("denoise", "Approximate u and its derivatives");
    denoise->add_option("--data", data_dir, "dataset directory")->required();
    denoise->add_option("--method", method, "fd | spline | ann")->required();
    denoise->add_option("--ann-seed", ann_seed, "training seed (ann)");
    denoise->add_option("--hidden", ann_defaults.ann_hidden, "hidden units (ann)");
    denoise->add_option("--batch", ann_defaults.ann_batch, "batch size (ann)");
    denoise->add_option("--patience", ann_defaults.ann_patience, "early-stop patience (ann)");
    denoise->add_option("--max-epochs", ann_defaults.ann_max_epochs, "epoch cap (ann)");
    denoise->add_option("--gamma", ann_defaults.ann_gamma, "GLS power (ann)");
    denoise->add_option("--lambda", ann_defaults.ann_lambda, "pre-activation penalty (ann)");
    denoise->add_option("--step", ann_defaults.ann_step, "optimizer step size (ann)");

    // learn
    LearnOptions learn_opts;
    std::string learn_dir, learn_method;
    bool no_prune = false;
    std::size_t skip = 0, stride = 1;
    bool subsample_set = false;
    auto* learn = app.add_subcommand("learn", "Recover the PDE by sparse regression");
    learn->add_option("--data", learn_dir, "dataset directory")->required();
    learn->add_option("--method", learn_method, "which bundle to use")->required();
    learn->add_option("--splits", learn_opts.splits, "number of train/validation splits");
    learn->add_option("--alpha", learn_opts.alpha, "pruning threshold (default per model)");
    learn->add_flag("--no-prune", no_prune, "skip the pruning sensitivity test");
    learn->add_option("--seed", learn_opts.seed_base, "split seed base");
    learn->add_option("--tile", learn_opts.tile_size, "split tile size");
    learn->add_option("--workers", learn_opts.workers, "parallel split workers");
    learn->add_option("--skip", skip, "drop this many leading timepoints")
        ->each([&](const std::string&) { subsample_set = true; });
    learn->add_option("--stride", stride, "keep every stride-th timepoint")
        ->each([&](const std::string&) { subsample_set = true; });

    // refine
    std::string refine_dir, refine_method;
    double refine_gamma = 1.0;
    auto* refine = app.add_subcommand("refine", "Polish coefficients by forward-solve fitting");
    refine->add_option("--data", refine_dir, "dataset directory")->required();
    refine->add_option("--method", refine_method, "which learned equation to refine")->required();
    refine->add_option("--gamma", refine_gamma, "GLS power for the objective");

    // report
    std::string report_dir;
    auto* report = app.add_subcommand("report", "Merge per-dataset artifacts into rmse.csv, tpr.csv, equations.json");
    report->add_option("--out", report_dir, "experiment output directory")->required();

    // experiment
    std::string config_path;
    bool dump_config = false;
    bool lock_only = false;
    ExperimentConfig overrides;
    bool splits_set = false, out_set = false, seed_set = false, no_prune_exp = false,
         inverse_set = false;
    auto* experiment = app.add_subcommand("experiment", "Run the full pipeline from a config file");
    experiment->add_option("--config", config_path, "JSON config file");
    experiment->add_flag("--dump-config", dump_config, "print the resolved config and exit");
    experiment->add_flag("--lock-only", lock_only, "write config.lock and directories, run nothing");
    experiment->add_option("--splits", overrides.splits)->each([&](const std::string&) {
        splits_set = true;
    });
    experiment->add_option("--out", overrides.output_dir)->each([&](const std::string&) {
        out_set = true;
    });
    experiment->add_option("--seed", overrides.master_seed)->each([&](const std::string&) {
        seed_set = true;
    });
    experiment->add_flag("--no-prune", no_prune_exp, "disable pruning");
    experiment->add_flag("--inverse", inverse_set, "enable inverse-problem refinement");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(model, sigma, seed, out_dir);
        if (denoise->parsed()) {
            TrainConfig tc = ann_defaults.train_config(ann_seed);
            return cmd_denoise(data_dir, method, tc);
        }
        if (learn->parsed()) {
            learn_opts.prune = !no_prune;
            if (subsample_set) {
                learn_opts.subsample = SubsampleOptions{skip, stride};
                learn_opts.subsample_is_default = false;
            }
            return cmd_learn(learn_dir, learn_method, learn_opts);
        }
        if (refine->parsed()) return cmd_refine(refine_dir, refine_method, refine_gamma);
        if (report->parsed()) {
            stage_report(report_dir);
            std::cerr << "wrote rmse.csv, tpr.csv, equations.json in " << report_dir << "\n";
            return 0;
        }
        if (experiment->parsed()) {
            ExperimentConfig cfg;
            if (!config_path.empty())
                cfg = config_from_json(nlohmann::json::parse(read_file(config_path)));
            if (splits_set) cfg.splits = overrides.splits;
            if (out_set) cfg.output_dir = overrides.output_dir;
            if (seed_set) cfg.master_seed = overrides.master_seed;
            if (no_prune_exp) cfg.pruning = false;
            if (inverse_set) cfg.inverse_problem = true;
            cfg.validate();
            if (dump_config) {
                std::cout << config_to_json(cfg).dump(2) << "\n";
                return 0;
            }
            if (lock_only) {
                write_config_lock(cfg);
                std::cerr << "wrote " << cfg.output_dir << "/config.lock\n";
                return 0;
            }
            const ExperimentReport rep = run_experiment(cfg);
            std::cerr << "experiment finished; reports in " << rep.output_dir << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const StaleArtifactError& e) {
        std::cerr << "stale artifact: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
