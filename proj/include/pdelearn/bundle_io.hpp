#pragma once

#include <filesystem>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pdelearn/dataset_io.hpp"
#include "pdelearn/derivative_bundle.hpp"
#include "pdelearn/io_util.hpp"

namespace pdelearn {

inline std::string bundle_csv_name(DenoiseMethod m) {
    return "bundle_" + denoise_method_name(m) + ".csv";
}
inline std::string bundle_meta_name(DenoiseMethod m) {
    return "bundle_" + denoise_method_name(m) + ".json";
}

/// Persists a derivative bundle next to its dataset, recording the dataset
/// hash so later stages can detect staleness.
inline void save_bundle(const DerivativeBundle& bundle, const std::string& dir,
                        const std::string& dataset_hash) {
    namespace fs = std::filesystem;
    const Grid& g = bundle.grid();
    std::ostringstream csv;
    csv << "# pdelearn-bundle v1\n";
    csv << "# method=" << denoise_method_name(bundle.method) << "\n";
    csv << "x,t,u,u_t,u_x,u_xx\n";
    for (std::size_t j = 0; j < g.nt(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const auto ei = static_cast<Eigen::Index>(i);
            const auto ej = static_cast<Eigen::Index>(j);
            csv << fmt_double(g.x()[i]) << ',' << fmt_double(g.t()[j]) << ','
                << fmt_double(bundle.u.values(ei, ej)) << ','
                << fmt_double(bundle.u_t.values(ei, ej)) << ','
                << fmt_double(bundle.u_x.values(ei, ej)) << ','
                << fmt_double(bundle.u_xx.values(ei, ej)) << "\n";
        }
    write_file_atomic((fs::path(dir) / bundle_csv_name(bundle.method)).string(), csv.str());

    nlohmann::json meta = {{"format", "pdelearn-bundle"},
                           {"method", denoise_method_name(bundle.method)},
                           {"dataset_hash", dataset_hash},
                           {"nx", g.nx()},
                           {"nt", g.nt()}};
    write_file_atomic((fs::path(dir) / bundle_meta_name(bundle.method)).string(),
                      meta.dump(2) + "\n");
}

/// Loads a bundle and refuses if the dataset it was computed from changed.
inline DerivativeBundle load_bundle(const std::string& dir, DenoiseMethod method) {
    namespace fs = std::filesystem;
    const auto meta_path = (fs::path(dir) / bundle_meta_name(method)).string();
    const auto csv_path = (fs::path(dir) / bundle_csv_name(method)).string();
    if (!fs::exists(meta_path) || !fs::exists(csv_path))
        throw IoError("no " + denoise_method_name(method) + " bundle in " + dir +
                      "; run the denoise stage first");
    const auto meta = nlohmann::json::parse(read_file(meta_path));
    const std::string recorded = meta.at("dataset_hash").get<std::string>();
    const std::string current = hash_file((fs::path(dir) / "dataset.csv").string());
    if (recorded != current)
        throw StaleArtifactError("bundle in " + dir + " was computed from a different dataset " +
                                 "(hash " + recorded + " != " + current +
                                 "); re-run the denoise stage");

    const auto nx = meta.at("nx").get<std::size_t>();
    const auto nt = meta.at("nt").get<std::size_t>();
    std::istringstream csv(read_file(csv_path));
    std::string line;
    std::vector<double> x(nx), t(nt);
    Eigen::MatrixXd u(nx, nt), ut(nx, nt), ux(nx, nt), uxx(nx, nt);
    bool header_seen = false;
    std::size_t row = 0;
    while (std::getline(csv, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 6) throw IoError("malformed bundle row: " + line);
        const std::size_t i = row % nx;
        const std::size_t j = row / nx;
        if (j >= nt) throw IoError("bundle csv has more rows than nx*nt");
        const auto ei = static_cast<Eigen::Index>(i);
        const auto ej = static_cast<Eigen::Index>(j);
        x[i] = parse_double(cells[0]);
        t[j] = parse_double(cells[1]);
        u(ei, ej) = parse_double(cells[2]);
        ut(ei, ej) = parse_double(cells[3]);
        ux(ei, ej) = parse_double(cells[4]);
        uxx(ei, ej) = parse_double(cells[5]);
        ++row;
    }
    if (row != nx * nt) throw IoError("bundle csv row count mismatch");
    Grid g(std::move(x), std::move(t));
    return DerivativeBundle{Field(g, std::move(u), "u"), Field(g, std::move(ut), "u_t"),
                            Field(g, std::move(ux), "u_x"), Field(g, std::move(uxx), "u_xx"),
                            method};
}

}  // namespace pdelearn
