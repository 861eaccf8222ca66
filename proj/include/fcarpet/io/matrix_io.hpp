#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/io/binary.hpp"

namespace fcarpet::io {

/// Matrix file layout (little-endian):
///
///     offset  size  field
///          0     8  magic "FCMATRIX"
///          8     4  uint32 format version (1)
///         12     4  uint32 dtype tag: 1 = float64, 2 = complex128 (re, im)
///         16     8  uint64 rows
///         24     8  uint64 cols
///         32    32  zero padding
///         64     -  row-major data
inline constexpr std::array<char, 8> matrix_magic{'F', 'C', 'M', 'A', 'T', 'R', 'I', 'X'};
inline constexpr std::uint32_t matrix_version = 1;
inline constexpr std::size_t matrix_header_bytes = 64;

template <class T>
constexpr std::uint32_t dtype_tag() {
    if constexpr (std::is_same_v<T, double>) {
        return 1;
    } else {
        static_assert(std::is_same_v<T, std::complex<double>>, "unsupported matrix element type");
        return 2;
    }
}

template <class T>
void write_matrix(std::ostream& os, const Matrix<T>& m) {
    os.write(matrix_magic.data(), matrix_magic.size());
    put<std::uint32_t>(os, matrix_version);
    put<std::uint32_t>(os, dtype_tag<T>());
    put<std::uint64_t>(os, m.rows());
    put<std::uint64_t>(os, m.cols());
    const std::array<char, 32> pad{};
    os.write(pad.data(), pad.size());
    for (const T& v : m.data()) {
        if constexpr (std::is_same_v<T, double>) {
            put<double>(os, v);
        } else {
            put<double>(os, v.real());
            put<double>(os, v.imag());
        }
    }
}

template <class T>
void write_matrix(const std::filesystem::path& path, const Matrix<T>& m) {
    atomic_write(path, [&](std::ostream& os) { write_matrix(os, m); });
}

template <class T>
Matrix<T> read_matrix(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ResourceError("cannot open " + path.string());
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != matrix_magic) throw ValidationError("not a matrix file: " + path.string());
    if (get<std::uint32_t>(is) != matrix_version) throw ValidationError("unsupported matrix file version");
    if (get<std::uint32_t>(is) != dtype_tag<T>()) throw ValidationError("matrix file holds a different dtype");
    const auto rows = get<std::uint64_t>(is);
    const auto cols = get<std::uint64_t>(is);
    is.seekg(static_cast<std::streamoff>(matrix_header_bytes));
    Matrix<T> m(rows, cols);
    for (T& v : m.data()) {
        if constexpr (std::is_same_v<T, double>) {
            v = get<double>(is);
        } else {
            const double re = get<double>(is);
            v = {re, get<double>(is)};
        }
    }
    return m;
}

}  // namespace fcarpet::io
