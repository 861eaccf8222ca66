#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/idealgas/evolution.hpp"
#include "fcarpet/io/binary.hpp"
#include "fcarpet/io/matrix_io.hpp"

namespace fcarpet::io {

/// Writes `<stem>.carpet.bin` (density matrix) and `<stem>.carpet.json`
/// (grid, times and provenance of the rows). Returns the binary path.
inline std::filesystem::path write_carpet(const std::filesystem::path& stem, const Carpet& c) {
    const std::filesystem::path bin = stem.string() + ".carpet.bin";
    const std::filesystem::path meta = stem.string() + ".carpet.json";
    write_matrix(bin, c.density);
    nlohmann::json j;
    j["format"] = "fcarpet-carpet";
    j["version"] = 1;
    j["n_points"] = c.grid.n_points();
    j["box_length"] = 1.0;
    j["rows"] = c.density.rows();
    j["cols"] = c.density.cols();
    j["orientation"] = "row i = times[i], column j = x_j = j / n_points";
    j["times"] = c.times;
    j["N"] = c.N;
    j["trap"] = c.trap;
    j["k_max"] = c.k_max;
    const std::string text = j.dump(2) + "\n";
    atomic_write(meta, [&](std::ostream& os) { os << text; });
    return bin;
}

inline Carpet read_carpet(const std::filesystem::path& stem) {
    const std::filesystem::path meta = stem.string() + ".carpet.json";
    std::ifstream is(meta);
    if (!is) throw ResourceError("cannot open " + meta.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed carpet sidecar " + meta.string() + ": " + e.what());
    }
    Carpet c;
    c.grid = SpaceGrid(j.at("n_points").get<int>());
    c.times = j.at("times").get<std::vector<double>>();
    c.N = j.at("N").get<double>();
    c.trap = j.at("trap").get<std::string>();
    c.k_max = j.at("k_max").get<int>();
    c.density = read_matrix<double>(stem.string() + ".carpet.bin");
    if (c.density.rows() != c.times.size() || c.density.cols() != c.grid.node_count()) {
        throw ValidationError("carpet sidecar does not match the binary shape");
    }
    return c;
}

}  // namespace fcarpet::io
