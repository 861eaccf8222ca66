#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/io/binary.hpp"

namespace fcarpet::io {

/// Column-oriented numeric table with a header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    void add(std::string name, std::vector<double> values) {
        if (!columns.empty() && values.size() != columns.front().size()) {
            throw DomainError("Table: column '" + name + "' has a different length");
        }
        header.push_back(std::move(name));
        columns.push_back(std::move(values));
    }
    [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    [[nodiscard]] const std::vector<double>& column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return columns[i];
        throw DomainError("Table: no column '" + name + "'");
    }
};

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

inline void write_csv(const std::filesystem::path& path, const Table& t) {
    atomic_write(path, [&](std::ostream& os) {
        for (std::size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << t.header[c];
        os << '\n';
        for (std::size_t r = 0; r < t.rows(); ++r) {
            for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << format_double(t.columns[c][r]);
            os << '\n';
        }
    });
}

inline Table read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ResourceError("cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty CSV file " + path.string());
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    t.columns.resize(t.header.size());
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t c = 0;
        for (std::string cell; std::getline(ls, cell, ','); ++c) {
            if (c >= t.columns.size()) throw ValidationError("CSV line " + std::to_string(lineno) + " has extra cells");
            double v = 0;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (r.ec != std::errc{} || r.ptr != cell.data() + cell.size()) {
                throw ValidationError("CSV line " + std::to_string(lineno) + ": not a number '" + cell + "'");
            }
            t.columns[c].push_back(v);
        }
        if (c != t.columns.size()) throw ValidationError("CSV line " + std::to_string(lineno) + " is short");
    }
    return t;
}

}  // namespace fcarpet::io
