#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/io/binary.hpp"
#include "fcarpet/meanfield/state.hpp"

namespace fcarpet {

/// Checkpoint layout (all little-endian):
///
///     offset  size  field
///          0     8  magic "FCKPT\0\0\1"
///          8     4  uint32 format version (1)
///         12     4  uint32 n_points
///         16     4  uint32 orbitals per component (N/2)
///         20     4  uint32 reserved (0)
///         24     8  float64 g
///         32     8  float64 t
///         40     -  plus orbitals, then minus orbitals; each orbital is
///                   n_points + 1 (re, im) float64 pairs over all nodes
///
/// Values are stored bit-exactly, so a resumed run continues identically.
inline constexpr std::array<char, 8> checkpoint_magic{'F', 'C', 'K', 'P', 'T', '\0', '\0', '\1'};
inline constexpr std::uint32_t checkpoint_version = 1;

inline void save_checkpoint(const MeanFieldState& s, const std::filesystem::path& path) {
    io::atomic_write(path, [&](std::ostream& os) {
        os.write(checkpoint_magic.data(), checkpoint_magic.size());
        io::put<std::uint32_t>(os, checkpoint_version);
        io::put<std::uint32_t>(os, static_cast<std::uint32_t>(s.grid.n_points()));
        io::put<std::uint32_t>(os, static_cast<std::uint32_t>(s.per_component()));
        io::put<std::uint32_t>(os, 0);
        io::put<double>(os, s.g);
        io::put<double>(os, s.t);
        for (const auto* m : {&s.plus, &s.minus}) {
            for (const cplx& v : m->data()) {
                io::put<double>(os, v.real());
                io::put<double>(os, v.imag());
            }
        }
    });
}

inline MeanFieldState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ResourceError("cannot open checkpoint " + path.string());
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != checkpoint_magic) throw ValidationError("not a checkpoint file: " + path.string());
    if (io::get<std::uint32_t>(is) != checkpoint_version) throw ValidationError("unsupported checkpoint version");
    const auto n_points = io::get<std::uint32_t>(is);
    const auto half = io::get<std::uint32_t>(is);
    (void)io::get<std::uint32_t>(is);
    MeanFieldState s{SpaceGrid(static_cast<int>(n_points)), {}, {}, 0.0, 0.0};
    s.g = io::get<double>(is);
    s.t = io::get<double>(is);
    s.plus = Matrix<cplx>(half, s.grid.node_count());
    s.minus = Matrix<cplx>(half, s.grid.node_count());
    for (auto* m : {&s.plus, &s.minus}) {
        for (cplx& v : m->data()) {
            const double re = io::get<double>(is);
            const double im = io::get<double>(is);
            v = {re, im};
        }
    }
    if (is.peek() != std::char_traits<char>::eof()) throw ValidationError("checkpoint has trailing data");
    return s;
}

}  // namespace fcarpet
