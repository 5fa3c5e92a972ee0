#pragma once

#include <filesystem>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pdelearn/dataset.hpp"
#include "pdelearn/io_util.hpp"

namespace pdelearn {

inline nlohmann::json model_to_json(const ModelSpec& m) {
    return {{"kind", model_kind_name(m.kind)},
            {"diffusion", m.diffusion},
            {"advection", m.advection},
            {"growth", m.growth},
            {"ic",
             {{"profile",
               m.ic.profile == InitialCondition::Profile::Gaussian ? "gaussian" : "uniform"},
              {"center", m.ic.center},
              {"width", m.ic.width},
              {"amplitude", m.ic.amplitude}}}};
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
    ModelSpec m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.diffusion = j.at("diffusion").get<double>();
    m.advection = j.at("advection").get<double>();
    m.growth = j.at("growth").get<double>();
    const auto& ic = j.at("ic");
    m.ic.profile = ic.at("profile").get<std::string>() == "uniform"
                       ? InitialCondition::Profile::Uniform
                       : InitialCondition::Profile::Gaussian;
    m.ic.center = ic.at("center").get<double>();
    m.ic.width = ic.at("width").get<double>();
    m.ic.amplitude = ic.at("amplitude").get<double>();
    return m;
}

/**
 * Dataset persistence: a columnar CSV (x, t, u_clean, u_observed; time-major
 * row order) with `# key=value` metadata header lines, plus a structured
 * JSON sidecar carrying the model, noise, and scale records.
 */
inline void save_dataset(const NoisyDataset& ds, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const Grid& g = ds.observed.grid;

    std::ostringstream csv;
    csv << "# pdelearn-dataset v1\n";
    csv << "# model=" << model_kind_name(ds.model.kind) << "\n";
    csv << "# sigma=" << fmt_double(ds.noise.sigma) << "\n";
    csv << "# gamma=" << fmt_double(ds.noise.gamma) << "\n";
    csv << "# seed=" << ds.noise.seed << "\n";
    csv << "# nx=" << g.nx() << "\n";
    csv << "# nt=" << g.nt() << "\n";
    csv << "# scale_lo=" << fmt_double(ds.scale.lo) << "\n";
    csv << "# scale_hi=" << fmt_double(ds.scale.hi) << "\n";
    csv << "x,t,u_clean,u_observed\n";
    for (std::size_t j = 0; j < g.nt(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const auto ei = static_cast<Eigen::Index>(i);
            const auto ej = static_cast<Eigen::Index>(j);
            csv << fmt_double(g.x()[i]) << ',' << fmt_double(g.t()[j]) << ','
                << fmt_double(ds.clean.values(ei, ej)) << ','
                << fmt_double(ds.observed.values(ei, ej)) << "\n";
        }
    write_file_atomic((fs::path(dir) / "dataset.csv").string(), csv.str());

    nlohmann::json meta = {{"format", "pdelearn-dataset"},
                           {"version", 1},
                           {"model", model_to_json(ds.model)},
                           {"noise",
                            {{"sigma", ds.noise.sigma},
                             {"gamma", ds.noise.gamma},
                             {"seed", ds.noise.seed}}},
                           {"scale", {{"lo", ds.scale.lo}, {"hi", ds.scale.hi}}},
                           {"nx", g.nx()},
                           {"nt", g.nt()}};
    write_file_atomic((fs::path(dir) / "dataset.json").string(), meta.dump(2) + "\n");
}

inline NoisyDataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    const auto meta = nlohmann::json::parse(read_file((fs::path(dir) / "dataset.json").string()));
    const auto nx = meta.at("nx").get<std::size_t>();
    const auto nt = meta.at("nt").get<std::size_t>();

    std::istringstream csv(read_file((fs::path(dir) / "dataset.csv").string()));
    std::string line;
    std::vector<double> x(nx), t(nt);
    Eigen::MatrixXd clean(nx, nt), observed(nx, nt);
    bool header_seen = false;
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) throw IoError("malformed dataset row: " + line);
        const std::size_t i = row % nx;
        const std::size_t j = row / nx;
        if (j >= nt) throw IoError("dataset.csv has more rows than nx*nt");
        x[i] = parse_double(cells[0]);
        t[j] = parse_double(cells[1]);
        clean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(cells[2]);
        observed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            parse_double(cells[3]);
        ++row;
    }
    if (row != nx * nt) throw IoError("dataset.csv row count mismatch");

    Grid grid(std::move(x), std::move(t));
    NoisyDataset ds{Field(grid, std::move(clean), "u"),
                    Field(grid, std::move(observed), "u_observed"),
                    model_from_json(meta.at("model")),
                    NoiseSpec{meta.at("noise").at("sigma").get<double>(),
                              meta.at("noise").at("gamma").get<double>(),
                              meta.at("noise").at("seed").get<std::uint64_t>()},
                    AffineScale{meta.at("scale").at("lo").get<double>(),
                                meta.at("scale").at("hi").get<double>()}};
    return ds;
}

}  // namespace pdelearn
