#pragma once

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/io/binary.hpp"
#include "fcarpet/io/csv.hpp"

namespace fcarpet::io {

enum class ColorScale { linear, percentile };

struct HeatmapOptions {
    ColorScale scale = ColorScale::linear;
    double clip_percent = 1.0;  // percentile scale: clip this share at each end
};

/// Value range mapped onto the 256 gray levels.
struct HeatmapNorm {
    double lo = 0.0;
    double hi = 0.0;
};

inline HeatmapNorm heatmap_norm(const Matrix<double>& m, const HeatmapOptions& opt) {
    if (m.data().empty()) throw DomainError("render_heatmap: empty matrix");
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < m.rows() && bad.size() < 10; ++i)
        for (std::size_t j = 0; j < m.cols() && bad.size() < 10; ++j)
            if (!std::isfinite(m(i, j))) bad.push_back("(" + std::to_string(i) + ", " + std::to_string(j) + ")");
    if (!bad.empty()) {
        std::string msg = "render_heatmap: non-finite values at";
        for (const auto& b : bad) msg += " " + b;
        throw DomainError(msg);
    }
    if (opt.scale == ColorScale::linear) {
        const auto [lo, hi] = std::minmax_element(m.data().begin(), m.data().end());
        return {*lo, *hi};
    }
    if (!(opt.clip_percent >= 0 && opt.clip_percent < 50)) throw DomainError("render_heatmap: clip_percent must be in [0, 50)");
    std::vector<double> v(m.data().begin(), m.data().end());
    std::sort(v.begin(), v.end());
    const auto at = [&](double q) {
        const auto k = static_cast<std::size_t>(std::llround(q * static_cast<double>(v.size() - 1)));
        return v[k];
    };
    return {at(opt.clip_percent / 100.0), at(1.0 - opt.clip_percent / 100.0)};
}

/// 8-bit gray levels, one per matrix entry. Image row 0 is the last matrix
/// row, so time (matrix rows) increases upward and x (columns) rightward.
inline std::vector<std::uint8_t> heatmap_pixels(const Matrix<double>& m, const HeatmapNorm& n) {
    std::vector<std::uint8_t> px(m.rows() * m.cols());
    const double span = n.hi - n.lo;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const std::size_t out_row = m.rows() - 1 - i;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            double u = span > 0 ? (m(i, j) - n.lo) / span : 0.5;
            u = std::clamp(u, 0.0, 1.0);
            px[out_row * m.cols() + j] = static_cast<std::uint8_t>(std::lround(255.0 * u));
        }
    }
    return px;
}

/// Writes a grayscale PNG plus `<path>.txt` recording the normalization.
inline void render_heatmap(const Matrix<double>& m, const std::filesystem::path& path, const HeatmapOptions& opt = {}) {
    const HeatmapNorm norm = heatmap_norm(m, opt);
    const auto px = heatmap_pixels(m, norm);
    atomic_write(path, [&](std::ostream& os) {
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png == nullptr) throw ResourceError("libpng: cannot create write struct");
        png_infop info = png_create_info_struct(png);
        if (info == nullptr || setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            throw ResourceError("libpng: encoding failed");
        }
        png_set_write_fn(
            png, &os,
            [](png_structp p, png_bytep data, png_size_t len) {
                static_cast<std::ostream*>(png_get_io_ptr(p))->write(reinterpret_cast<const char*>(data),
                                                                      static_cast<std::streamsize>(len));
            },
            [](png_structp p) { static_cast<std::ostream*>(png_get_io_ptr(p))->flush(); });
        png_set_IHDR(png, info, static_cast<png_uint_32>(m.cols()), static_cast<png_uint_32>(m.rows()), 8,
                     PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (std::size_t r = 0; r < m.rows(); ++r) png_write_row(png, px.data() + r * m.cols());
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    });
    std::ostringstream side;
    side << "scale = " << (opt.scale == ColorScale::linear ? "linear" : "percentile") << '\n'
         << "clip_percent = " << format_double(opt.scale == ColorScale::linear ? 0.0 : opt.clip_percent) << '\n'
         << "value_at_black = " << format_double(norm.lo) << '\n'
         << "value_at_white = " << format_double(norm.hi) << '\n'
         << "rows = " << m.rows() << '\n'
         << "cols = " << m.cols() << '\n'
         << "orientation = matrix row 0 at the bottom image row; column 0 at the left\n";
    const std::string text = side.str();
    atomic_write(path.string() + ".txt", [&](std::ostream& os) { os << text; });
}

/// Reads an 8-bit grayscale PNG back into rows of pixels (top row first).
inline std::vector<std::vector<std::uint8_t>> read_gray_png(const std::filesystem::path& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str())) throw ResourceError("cannot read PNG " + path.string());
    img.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&img);
        throw ResourceError("cannot decode PNG " + path.string());
    }
    std::vector<std::vector<std::uint8_t>> rows(img.height);
    for (std::size_t r = 0; r < img.height; ++r)
        rows[r].assign(buf.begin() + static_cast<long>(r * img.width), buf.begin() + static_cast<long>((r + 1) * img.width));
    return rows;
}

}  // namespace fcarpet::io
