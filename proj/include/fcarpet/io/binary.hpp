#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <system_error>

#include "fcarpet/core/errors.hpp"

namespace fcarpet::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
}

template <class T>
void put(std::ostream& os, T v) {
    v = to_little(v);
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ValidationError("binary read: unexpected end of file");
    return to_little(v);
}

/// Writes via a temporary file in the same directory, then renames it over
/// `path`, so readers never observe a partially written file.
inline void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (!fs::exists(dir)) throw ResourceError("output directory does not exist: " + dir.string());
    std::random_device rd;
    const fs::path tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ResourceError("cannot open " + tmp.string() + " for writing");
        body(os);
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ResourceError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ResourceError("cannot move output into place: " + path.string());
    }
}

}  // namespace fcarpet::io
