#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <utility>

#include "fcarpet/core/errors.hpp"

namespace fcarpet {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// Orthonormal discrete sine transform (DST-I) between interior grid samples
/// and hard-wall mode amplitudes.
///
/// With M = n + 1 grid intervals, samples psi_j at x_j = j/M (j = 1..n) and
/// amplitudes c_k (k = 1..n) are related by
///     psi_j = sum_k c_k sqrt(2) sin(pi j k / M),
///     c_k   = (sqrt(2)/M) sum_j psi_j sin(pi j k / M),
/// so c_k are the coefficients on the unit-normalized modes of the unit box.
///
/// Plans use FFTW_ESTIMATE: the chosen algorithm is deterministic, which keeps
/// repeated runs bit-identical.
class SineTransform {
public:
    explicit SineTransform(std::size_t n) : n_(n) {
        if (n == 0) throw DomainError("SineTransform: size must be positive");
        in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        out_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan_ = fftw_plan_r2r_1d(static_cast<int>(n), in_, out_, FFTW_RODFT00, FFTW_ESTIMATE);
        if (plan_ == nullptr) throw NumericError("SineTransform: FFTW planning failed");
    }

    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;
    SineTransform(SineTransform&& other) noexcept
        : n_(other.n_),
          in_(std::exchange(other.in_, nullptr)),
          out_(std::exchange(other.out_, nullptr)),
          plan_(std::exchange(other.plan_, nullptr)) {}
    SineTransform& operator=(SineTransform&& other) noexcept {
        if (this != &other) {
            release();
            n_ = other.n_;
            in_ = std::exchange(other.in_, nullptr);
            out_ = std::exchange(other.out_, nullptr);
            plan_ = std::exchange(other.plan_, nullptr);
        }
        return *this;
    }
    ~SineTransform() { release(); }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    /// Interior samples -> mode amplitudes.
    void forward(std::span<const double> samples, std::span<double> coeffs) {
        run(samples, coeffs, 1.0 / (std::sqrt(2.0) * static_cast<double>(n_ + 1)));
    }
    /// Mode amplitudes -> interior samples.
    void inverse(std::span<const double> coeffs, std::span<double> samples) {
        run(coeffs, samples, 1.0 / std::sqrt(2.0));
    }

    void forward(std::span<const std::complex<double>> samples,
                 std::span<std::complex<double>> coeffs) {
        run_complex(samples, coeffs, 1.0 / (std::sqrt(2.0) * static_cast<double>(n_ + 1)));
    }
    void inverse(std::span<const std::complex<double>> coeffs,
                 std::span<std::complex<double>> samples) {
        run_complex(coeffs, samples, 1.0 / std::sqrt(2.0));
    }

private:
    void check(std::size_t a, std::size_t b) const {
        if (a != n_ || b != n_) throw DomainError("SineTransform: size mismatch");
    }

    void run(std::span<const double> src, std::span<double> dst, double scale) {
        check(src.size(), dst.size());
        std::copy(src.begin(), src.end(), in_);
        fftw_execute(plan_);
        for (std::size_t i = 0; i < n_; ++i) dst[i] = scale * out_[i];
    }

    void run_complex(std::span<const std::complex<double>> src,
                     std::span<std::complex<double>> dst, double scale) {
        check(src.size(), dst.size());
        for (std::size_t i = 0; i < n_; ++i) in_[i] = src[i].real();
        fftw_execute(plan_);
        for (std::size_t i = 0; i < n_; ++i) in_[i] = src[i].imag();
        // src is fully read before dst is written, so the two may alias.
        for (std::size_t i = 0; i < n_; ++i) dst[i] = {scale * out_[i], 0.0};
        fftw_execute(plan_);
        for (std::size_t i = 0; i < n_; ++i) dst[i].imag(scale * out_[i]);
    }

    void release() noexcept {
        if (plan_ != nullptr) {
            std::lock_guard lock(detail::fftw_planner_mutex());
            fftw_destroy_plan(plan_);
        }
        if (in_ != nullptr) fftw_free(in_);
        if (out_ != nullptr) fftw_free(out_);
        plan_ = nullptr;
        in_ = out_ = nullptr;
    }

    std::size_t n_ = 0;
    double* in_ = nullptr;
    double* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

/// In-place DST-I of many complex rows at once. Rows hold `n + 2` samples
/// (both walls included) and only the n interior entries are transformed;
/// the output is unscaled, so forward followed by inverse multiplies by
/// 2 (n + 1).
class BatchSineTransform {
public:
    BatchSineTransform(std::size_t rows, std::size_t n) : rows_(rows), n_(n) {
        if (rows == 0 || n == 0) throw DomainError("BatchSineTransform: sizes must be positive");
        const std::size_t width = n + 2;
        buf_ = static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * rows * width));
        std::fill(buf_, buf_ + rows * width, std::complex<double>{});
        double* base = reinterpret_cast<double*>(buf_ + 1);
        fftw_iodim dim{static_cast<int>(n), 2, 2};
        fftw_iodim many[2] = {{static_cast<int>(rows), static_cast<int>(2 * width), static_cast<int>(2 * width)},
                              {2, 1, 1}};
        fftw_r2r_kind kind = FFTW_RODFT00;
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan_ = fftw_plan_guru_r2r(1, &dim, 2, many, base, base, &kind, FFTW_ESTIMATE);
        if (plan_ == nullptr) throw NumericError("BatchSineTransform: FFTW planning failed");
    }

    BatchSineTransform(const BatchSineTransform&) = delete;
    BatchSineTransform& operator=(const BatchSineTransform&) = delete;
    ~BatchSineTransform() {
        {
            std::lock_guard lock(detail::fftw_planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(buf_);
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    /// Row-major rows x (n + 2) working buffer the transform acts on.
    [[nodiscard]] std::span<std::complex<double>> buffer() noexcept { return {buf_, rows_ * (n_ + 2)}; }

    void execute() { fftw_execute(plan_); }

private:
    std::size_t rows_;
    std::size_t n_;
    std::complex<double>* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace fcarpet
