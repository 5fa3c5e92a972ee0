#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pdelearn/bicubic.hpp"
#include "pdelearn/bundle_io.hpp"
#include "pdelearn/dataset_io.hpp"
#include "pdelearn/equation_io.hpp"
#include "pdelearn/finite_difference.hpp"
#include "pdelearn/inverse_problem.hpp"
#include "pdelearn/metrics.hpp"
#include "pdelearn/sparse_regression.hpp"
#include "pdelearn/surrogate.hpp"
#include "pdelearn/surrogate_io.hpp"
#include "pdelearn/term_library.hpp"
#include "pdelearn/truth.hpp"

namespace pdelearn {

/**
 * Resolved description of one batch experiment: which models, noise levels,
 * and denoisers to run, how many train/validation splits, and every knob the
 * pipeline depends on. The full experiment is a pure function of this
 * structure plus the master seed.
 */
struct ExperimentConfig {
    std::vector<std::string> models = {"diffusion_advection"};
    std::vector<double> sigmas = {0.0};
    std::vector<std::string> methods = {"fd", "spline", "ann"};
    int splits = 100;          // desk-scale default; the full protocol uses 1000
    double alpha = -1.0;       // < 0: per-model default (0.25 / 0.25 / 0.05)
    int tile_size = 5;
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
    bool pruning = true;
    bool inverse_problem = false;
    int workers = 0;           // 0: hardware concurrency
    // Surrogate training knobs (denoise --method ann).
    long ann_hidden = 1000;
    long ann_batch = 10;
    int ann_patience = 50;
    int ann_max_epochs = 5000;
    double ann_gamma = 1.0;
    double ann_lambda = 0.0;
    double ann_step = 1e-3;
    double ann_val_fraction = 0.1;

    void validate() const {
        if (models.empty()) throw ConfigError("config lists no models");
        for (const auto& m : models) parse_model_kind(m);
        if (sigmas.empty()) throw ConfigError("config lists no sigma values");
        for (const double s : sigmas)
            if (s < 0.0) throw ConfigError("sigma must be >= 0");
        if (methods.empty()) throw ConfigError("config lists no denoise methods");
        for (const auto& m : methods)
            if (parse_denoise_method(m) == DenoiseMethod::Analytic)
                throw ConfigError("'analytic' is not a denoise method");
        if (splits < 1) throw ConfigError("splits must be >= 1");
        if (tile_size < 1) throw ConfigError("tile_size must be >= 1");
    }

    int resolved_workers() const {
        if (workers > 0) return workers;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc);
    }

    TrainConfig train_config(std::uint64_t seed) const {
        TrainConfig tc;
        tc.hidden = ann_hidden;
        tc.batch_size = ann_batch;
        tc.patience = ann_patience;
        tc.max_epochs = ann_max_epochs;
        tc.gamma = ann_gamma;
        tc.lambda = ann_lambda;
        tc.step_size = ann_step;
        tc.val_fraction = ann_val_fraction;
        tc.seed = seed;
        return tc;
    }
};

inline double resolve_alpha(double alpha, ModelKind kind) {
    if (alpha >= 0.0) return alpha;
    return kind == ModelKind::NonlinearFisherKpp ? 0.05 : 0.25;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    return {{"models", c.models},
            {"sigmas", c.sigmas},
            {"methods", c.methods},
            {"splits", c.splits},
            {"alpha", c.alpha},
            {"tile_size", c.tile_size},
            {"master_seed", c.master_seed},
            {"output_dir", c.output_dir},
            {"pruning", c.pruning},
            {"inverse_problem", c.inverse_problem},
            {"workers", c.workers},
            {"ann",
             {{"hidden", c.ann_hidden},
              {"batch", c.ann_batch},
              {"patience", c.ann_patience},
              {"max_epochs", c.ann_max_epochs},
              {"gamma", c.ann_gamma},
              {"lambda", c.ann_lambda},
              {"step", c.ann_step},
              {"val_fraction", c.ann_val_fraction}}}};
}

/// Parses a config file; absent keys keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.contains("models")) c.models = j.at("models").get<std::vector<std::string>>();
    if (j.contains("sigmas")) c.sigmas = j.at("sigmas").get<std::vector<double>>();
    if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("splits")) c.splits = j.at("splits").get<int>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("tile_size")) c.tile_size = j.at("tile_size").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("pruning")) c.pruning = j.at("pruning").get<bool>();
    if (j.contains("inverse_problem")) c.inverse_problem = j.at("inverse_problem").get<bool>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("ann")) {
        const auto& a = j.at("ann");
        if (a.contains("hidden")) c.ann_hidden = a.at("hidden").get<long>();
        if (a.contains("batch")) c.ann_batch = a.at("batch").get<long>();
        if (a.contains("patience")) c.ann_patience = a.at("patience").get<int>();
        if (a.contains("max_epochs")) c.ann_max_epochs = a.at("max_epochs").get<int>();
        if (a.contains("gamma")) c.ann_gamma = a.at("gamma").get<double>();
        if (a.contains("lambda")) c.ann_lambda = a.at("lambda").get<double>();
        if (a.contains("step")) c.ann_step = a.at("step").get<double>();
        if (a.contains("val_fraction")) c.ann_val_fraction = a.at("val_fraction").get<double>();
    }
    return c;
}

// ---------------------------------------------------------------------------
// Seed derivation: every stage seed is a pure function of the master seed and
// the run's position, so stages can be re-run independently and split i does
// not depend on splits < i.
// ---------------------------------------------------------------------------

inline std::uint64_t dataset_seed(std::uint64_t master, std::size_t mi, std::size_t si) {
    return derive_seed(master, {1, mi, si});
}
inline std::uint64_t ann_train_seed(std::uint64_t master, std::size_t mi, std::size_t si) {
    return derive_seed(master, {2, mi, si});
}
inline std::uint64_t learn_seed_base(std::uint64_t master, std::size_t mi, std::size_t si,
                                     std::size_t di) {
    return derive_seed(master, {3, mi, si, di});
}
inline std::uint64_t split_seed(std::uint64_t seed_base, std::size_t split_index) {
    return derive_seed(seed_base, {split_index});
}

inline std::string sigma_tag(double sigma) { return "sigma_" + fmt_double(sigma); }

inline std::string run_dir(const std::string& output_dir, ModelKind kind, double sigma) {
    return (std::filesystem::path(output_dir) / model_kind_name(kind) / sigma_tag(sigma))
        .string();
}

namespace detail {

template <typename F>
void parallel_for(std::size_t n, int workers, F&& body) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(workers, static_cast<int>(n));
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stages. Each one reads its input artifact from `dir`, writes its outputs
// there, and validates content hashes so stale artifacts are refused.
// ---------------------------------------------------------------------------

/// generate: solve the model, add noise, persist the dataset.
inline NoisyDataset stage_generate(const ModelSpec& spec, const Grid& grid,
                                   const NoiseSpec& noise, const std::string& dir) {
    NoisyDataset ds = generate_dataset(spec, grid, noise);
    save_dataset(ds, dir);
    return ds;
}

struct DenoiseOutcome {
    DerivativeBundle bundle;
    bool reused_checkpoint = false;
};

/// denoise: compute the requested derivative bundle and its RMSE rows
/// against the truth reference. ANN training is cached as a checkpoint and
/// reused when the dataset and training configuration are unchanged.
inline DenoiseOutcome stage_denoise(const std::string& dir, DenoiseMethod method,
                                    const TrainConfig& ann_cfg = {}) {
    namespace fs = std::filesystem;
    const NoisyDataset ds = load_dataset(dir);
    const std::string dataset_hash = hash_file((fs::path(dir) / "dataset.csv").string());

    DenoiseOutcome out{DerivativeBundle{Field::zeros(ds.observed.grid, "u"),
                                        Field::zeros(ds.observed.grid, "u_t"),
                                        Field::zeros(ds.observed.grid, "u_x"),
                                        Field::zeros(ds.observed.grid, "u_xx"), method},
                       false};
    if (method == DenoiseMethod::FD) {
        out.bundle = fd_bundle(ds);
    } else if (method == DenoiseMethod::Spline) {
        out.bundle = spline_bundle(ds);
    } else if (method == DenoiseMethod::ANN) {
        const std::string ckpt = (fs::path(dir) / "ann_checkpoint.bin").string();
        const std::string ckpt_meta = (fs::path(dir) / "ann_checkpoint.json").string();
        const nlohmann::json fingerprint = {{"dataset_hash", dataset_hash},
                                            {"seed", ann_cfg.seed},
                                            {"hidden", ann_cfg.hidden},
                                            {"batch", ann_cfg.batch_size},
                                            {"patience", ann_cfg.patience},
                                            {"max_epochs", ann_cfg.max_epochs},
                                            {"gamma", ann_cfg.gamma},
                                            {"lambda", ann_cfg.lambda},
                                            {"step", ann_cfg.step_size},
                                            {"val_fraction", ann_cfg.val_fraction}};
        bool reuse = false;
        if (fs::exists(ckpt) && fs::exists(ckpt_meta)) {
            const auto meta = nlohmann::json::parse(read_file(ckpt_meta));
            reuse = meta == fingerprint;
        }
        if (reuse) {
            const auto [net, scaling] = load_surrogate(ckpt);
            out.bundle = ann_bundle(net, ds.observed.grid, scaling);
            out.reused_checkpoint = true;
        } else {
            const TrainResult tr = train_surrogate(rescale_unit(ds), ann_cfg);
            save_surrogate(ckpt, tr.net, tr.scaling);
            write_file_atomic(ckpt_meta, fingerprint.dump(2) + "\n");
            out.bundle = ann_bundle(tr.net, ds.observed.grid, tr.scaling);
        }
    } else {
        throw ConfigError("denoise stage supports fd, spline, and ann");
    }

    save_bundle(out.bundle, dir, dataset_hash);

    const DerivativeBundle truth = truth_bundle_for(ds);
    std::ostringstream csv;
    csv << "method,sigma,field,rmse\n";
    const std::string mname = denoise_method_name(method);
    const std::string sig = fmt_double(ds.noise.sigma);
    csv << mname << ',' << sig << ",u," << fmt_double(rmse(out.bundle.u, truth.u)) << "\n";
    csv << mname << ',' << sig << ",u_t," << fmt_double(rmse(out.bundle.u_t, truth.u_t)) << "\n";
    csv << mname << ',' << sig << ",u_x," << fmt_double(rmse(out.bundle.u_x, truth.u_x)) << "\n";
    csv << mname << ',' << sig << ",u_xx," << fmt_double(rmse(out.bundle.u_xx, truth.u_xx))
        << "\n";
    write_file_atomic((fs::path(dir) / ("rmse_" + mname + ".csv")).string(), csv.str());
    return out;
}

struct LearnOptions {
    int splits = 100;
    double alpha = -1.0;  // < 0: per-model default
    bool prune = true;
    std::uint64_t seed_base = 0;
    int tile_size = 5;
    int workers = 1;
    std::vector<double> k_grid;      // empty: default_k_grid()
    SubsampleOptions subsample;      // resolved by caller or from the model default
    bool subsample_is_default = true;
};

struct LearnOutcome {
    std::vector<LearnedEquation> runs;
    EquationSummary summary;
    double alpha = 0.0;
};

/// learn: split the library `splits` times, run selection (and optionally
/// pruning) per split, aggregate, and persist per-split and modal results.
inline LearnOutcome stage_learn(const std::string& dir, DenoiseMethod method,
                                LearnOptions opts) {
    namespace fs = std::filesystem;
    const auto meta = nlohmann::json::parse(read_file((fs::path(dir) / "dataset.json").string()));
    const ModelKind kind = parse_model_kind(meta.at("model").at("kind").get<std::string>());
    const double sigma = meta.at("noise").at("sigma").get<double>();

    const DerivativeBundle bundle = load_bundle(dir, method);
    if (opts.subsample_is_default) opts.subsample = default_subsample(kind);
    const Library lib = build_library(bundle, opts.subsample);
    const double alpha = resolve_alpha(opts.alpha, kind);
    const std::vector<double> grid = opts.k_grid.empty() ? default_k_grid() : opts.k_grid;

    LearnOutcome out;
    out.alpha = alpha;
    out.runs.resize(static_cast<std::size_t>(opts.splits));
    detail::parallel_for(static_cast<std::size_t>(opts.splits), opts.workers, [&](std::size_t i) {
        const TileSplit split = make_split(lib, opts.tile_size, split_seed(opts.seed_base, i));
        LearnedEquation eq = select_hyperparameter(lib, split, grid);
        if (opts.prune) eq = prune(lib, split, eq, alpha);
        eq.method = denoise_method_name(method);
        eq.sigma = sigma;
        out.runs[i] = std::move(eq);
    });
    out.summary = aggregate_equations(out.runs, [&] {
        const auto v = true_support(kind);
        return std::set<std::string>(v.begin(), v.end());
    }());

    const std::string mname = denoise_method_name(method);
    const std::string bundle_hash = hash_file((fs::path(dir) / bundle_csv_name(method)).string());
    nlohmann::json runs_json = nlohmann::json::array();
    for (const auto& eq : out.runs) runs_json.push_back(equation_to_json(eq));
    const nlohmann::json learned = {{"format", "pdelearn-learned"},
                                    {"method", mname},
                                    {"model", model_kind_name(kind)},
                                    {"sigma", sigma},
                                    {"bundle_hash", bundle_hash},
                                    {"splits", opts.splits},
                                    {"alpha", alpha},
                                    {"pruning", opts.prune},
                                    {"seed_base", opts.seed_base},
                                    {"subsample",
                                     {{"skip", opts.subsample.skip},
                                      {"stride", opts.subsample.stride}}},
                                    {"modal", summary_to_json(out.summary)},
                                    {"runs", runs_json}};
    write_file_atomic((fs::path(dir) / ("learned_" + mname + ".json")).string(),
                      learned.dump(2) + "\n");

    std::ostringstream tpr_csv;
    tpr_csv << "method,sigma,seed,tpr,support,val0\n";
    for (std::size_t i = 0; i < out.runs.size(); ++i) {
        const auto& eq = out.runs[i];
        std::string support;
        for (const auto& s : eq.support()) {
            if (!support.empty()) support += '|';
            support += s;
        }
        tpr_csv << mname << ',' << fmt_double(sigma) << ',' << eq.split_seed << ','
                << fmt_double(out.summary.tpr_values[i]) << ',' << support << ','
                << fmt_double(eq.val0) << "\n";
    }
    write_file_atomic((fs::path(dir) / ("tpr_" + mname + ".csv")).string(), tpr_csv.str());
    return out;
}

/// The learned-equation structure refinement targets: the union of terms the
/// surrogate path reports for the nonlinear Fisher model across noise levels
/// (u_xx, u*u_xx, u_x^2, u, u^2, constant).
inline std::vector<std::string> refinement_support(ModelKind kind,
                                                   const std::vector<std::string>& modal) {
    std::set<std::string> s(modal.begin(), modal.end());
    if (kind == ModelKind::NonlinearFisherKpp)
        for (const char* term : {"u_xx", "u*u_xx", "u_x^2", "u", "u^2", "1"}) s.insert(term);
    return {s.begin(), s.end()};
}

struct RefineOutcome {
    LearnedEquation equation;
    FitResult fit;
};

/// refine: simulate the modal learned equation forward and polish its
/// coefficients against the observations with the simplex search.
inline RefineOutcome stage_refine(const std::string& dir, DenoiseMethod method, double gamma,
                                  const NelderMeadOptions& nm = {}) {
    namespace fs = std::filesystem;
    const std::string mname = denoise_method_name(method);
    const std::string learned_path = (fs::path(dir) / ("learned_" + mname + ".json")).string();
    if (!fs::exists(learned_path))
        throw IoError("no learned equation in " + dir + "; run the learn stage first");
    const auto learned = nlohmann::json::parse(read_file(learned_path));

    const std::string bundle_hash =
        hash_file((fs::path(dir) / bundle_csv_name(method)).string());
    if (learned.at("bundle_hash").get<std::string>() != bundle_hash)
        throw StaleArtifactError("learned equation in " + dir +
                                 " was computed from a different bundle; re-run the learn stage");

    const NoisyDataset ds = load_dataset(dir);
    const ModelKind kind = ds.model.kind;
    const auto modal = learned.at("modal").at("modal_support").get<std::vector<std::string>>();
    const auto means =
        learned.at("modal").at("mean_coefficients").get<std::map<std::string, double>>();
    const auto skip = learned.at("subsample").at("skip").get<std::size_t>();

    const std::vector<std::string> support = refinement_support(kind, modal);
    Eigen::VectorXd init(static_cast<Eigen::Index>(support.size()));
    for (std::size_t a = 0; a < support.size(); ++a) {
        const auto it = means.find(support[a]);
        init(static_cast<Eigen::Index>(a)) = it == means.end() ? 0.0 : it->second;
    }

    // Restrict to the retained time range [skip, nt).
    const Grid& g = ds.observed.grid;
    if (skip + 3 > g.nt()) throw ConfigError("subsample skip leaves too few timepoints");
    std::vector<double> t_sub(g.t().begin() + static_cast<std::ptrdiff_t>(skip), g.t().end());
    Grid sub(g.x(), std::move(t_sub));
    const auto cols = static_cast<Eigen::Index>(sub.nt());
    const auto offset = static_cast<Eigen::Index>(skip);
    NoisyDataset sub_ds{
        Field(sub, ds.clean.values.middleCols(offset, cols), "u"),
        Field(sub, ds.observed.values.middleCols(offset, cols), "u_observed"),
        ds.model, ds.noise, ds.scale};

    CandidatePde pde{support, init, sub, sub_ds.observed.values.col(0)};
    RefineOutcome out;
    out.fit = fit_coefficients(pde, sub_ds, gamma, nm);

    LearnedEquation eq;
    eq.labels = term_labels();
    eq.xi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kNumTerms));
    for (std::size_t a = 0; a < support.size(); ++a)
        eq.xi(detail::term_index(support[a])) = out.fit.coefficients(static_cast<Eigen::Index>(a));
    eq.val0 = out.fit.cost;
    eq.method = "inverse_problem";
    eq.sigma = ds.noise.sigma;
    eq.alpha = -1.0;
    out.equation = eq;

    nlohmann::json refined = equation_to_json(eq);
    refined["refined_from"] = mname;
    refined["initial_cost"] = out.fit.initial_cost;
    refined["final_cost"] = out.fit.cost;
    refined["iterations"] = out.fit.iterations;
    refined["converged"] = out.fit.converged;
    write_file_atomic((fs::path(dir) / ("refined_" + mname + ".json")).string(),
                      refined.dump(2) + "\n");
    return out;
}

/// report: merge per-dataset artifacts into rmse.csv, tpr.csv, and
/// equations.json at the output root, in config.lock order.
inline void stage_report(const std::string& output_dir) {
    namespace fs = std::filesystem;
    const std::string lock_path = (fs::path(output_dir) / "config.lock").string();
    if (!fs::exists(lock_path))
        throw IoError("no config.lock in " + output_dir + "; run the experiment stage first");
    const auto lock = nlohmann::json::parse(read_file(lock_path));
    const auto methods = lock.at("config").at("methods").get<std::vector<std::string>>();

    std::string rmse_out = "method,sigma,field,rmse\n";
    std::string tpr_out = "method,sigma,seed,tpr,support,val0\n";
    nlohmann::json equations = nlohmann::json::array();
    for (const auto& run : lock.at("runs")) {
        const std::string dir = run.at("dir").get<std::string>();
        for (const auto& m : methods) {
            const std::string rmse_path = (fs::path(dir) / ("rmse_" + m + ".csv")).string();
            const std::string tpr_path = (fs::path(dir) / ("tpr_" + m + ".csv")).string();
            const std::string learned_path =
                (fs::path(dir) / ("learned_" + m + ".json")).string();
            if (fs::exists(rmse_path)) {
                std::istringstream in(read_file(rmse_path));
                std::string line;
                std::getline(in, line);  // header
                while (std::getline(in, line))
                    if (!line.empty()) rmse_out += line + "\n";
            }
            if (fs::exists(tpr_path)) {
                std::istringstream in(read_file(tpr_path));
                std::string line;
                std::getline(in, line);
                while (std::getline(in, line))
                    if (!line.empty()) tpr_out += line + "\n";
            }
            if (fs::exists(learned_path)) {
                const auto learned = nlohmann::json::parse(read_file(learned_path));
                nlohmann::json entry = {{"model", run.at("model")},
                                        {"sigma", run.at("sigma")},
                                        {"method", m},
                                        {"alpha", learned.at("alpha")},
                                        {"pruning", learned.at("pruning")},
                                        {"modal", learned.at("modal")}};
                const std::string refined_path =
                    (fs::path(dir) / ("refined_" + m + ".json")).string();
                if (fs::exists(refined_path))
                    entry["refined"] = nlohmann::json::parse(read_file(refined_path));
                equations.push_back(entry);
            }
        }
    }
    write_file_atomic((fs::path(output_dir) / "rmse.csv").string(), rmse_out);
    write_file_atomic((fs::path(output_dir) / "tpr.csv").string(), tpr_out);
    write_file_atomic((fs::path(output_dir) / "equations.json").string(),
                      equations.dump(2) + "\n");
}

/// Writes config.lock: the resolved configuration plus every derived seed,
/// which is what makes stagewise reruns byte-identical to the batch run.
inline nlohmann::json write_config_lock(const ExperimentConfig& cfg) {
    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        const ModelKind kind = parse_model_kind(cfg.models[mi]);
        for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
            nlohmann::json learn_seeds;
            for (std::size_t di = 0; di < cfg.methods.size(); ++di)
                learn_seeds[cfg.methods[di]] = learn_seed_base(cfg.master_seed, mi, si, di);
            runs.push_back({{"model", cfg.models[mi]},
                            {"sigma", cfg.sigmas[si]},
                            {"dir", run_dir(cfg.output_dir, kind, cfg.sigmas[si])},
                            {"dataset_seed", dataset_seed(cfg.master_seed, mi, si)},
                            {"ann_seed", ann_train_seed(cfg.master_seed, mi, si)},
                            {"learn_seeds", learn_seeds},
                            {"alpha", resolve_alpha(cfg.alpha, kind)}});
        }
    }
    nlohmann::json lock = {{"config", config_to_json(cfg)}, {"runs", runs}};
    write_file_atomic((std::filesystem::path(cfg.output_dir) / "config.lock").string(),
                      lock.dump(2) + "\n");
    return lock;
}

struct ExperimentReport {
    std::string output_dir;
    std::vector<std::string> run_dirs;
};

/**
 * End-to-end batch run: for every (model, sigma) generate the dataset, then
 * for every method denoise, learn over the configured splits, optionally
 * refine (nonlinear Fisher model only), and aggregate the reports. Identical
 * config and master seed give byte-identical outputs.
 */
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    write_config_lock(cfg);
    ExperimentReport report{cfg.output_dir, {}};

    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        const ModelKind kind = parse_model_kind(cfg.models[mi]);
        const ModelSpec spec = ModelSpec::preset(kind);
        const Grid grid = default_grid(kind);
        for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
            const std::string dir = run_dir(cfg.output_dir, kind, cfg.sigmas[si]);
            report.run_dirs.push_back(dir);
            stage_generate(spec, grid,
                           NoiseSpec{cfg.sigmas[si], 1.0, dataset_seed(cfg.master_seed, mi, si)},
                           dir);
            for (std::size_t di = 0; di < cfg.methods.size(); ++di) {
                const DenoiseMethod method = parse_denoise_method(cfg.methods[di]);
                stage_denoise(dir, method,
                              cfg.train_config(ann_train_seed(cfg.master_seed, mi, si)));
                LearnOptions lo;
                lo.splits = cfg.splits;
                lo.alpha = cfg.alpha;
                lo.prune = cfg.pruning;
                lo.seed_base = learn_seed_base(cfg.master_seed, mi, si, di);
                lo.tile_size = cfg.tile_size;
                lo.workers = cfg.resolved_workers();
                stage_learn(dir, method, lo);
                if (cfg.inverse_problem && kind == ModelKind::NonlinearFisherKpp)
                    stage_refine(dir, method, cfg.ann_gamma);
            }
        }
    }
    stage_report(cfg.output_dir);
    return report;
}

}  // namespace pdelearn
