#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/core/sine_transform.hpp"
#include "fcarpet/core/units.hpp"
#include "fcarpet/idealgas/spectral_state.hpp"

namespace fcarpet {

/// Density n(x_j, t_i) on a space-time grid.
struct Carpet {
    SpaceGrid grid;
    std::vector<double> times;
    Matrix<double> density;  // rows: times, cols: grid nodes
    double N = 0.0;
    std::string trap;
    int k_max = 0;

    [[nodiscard]] std::span<const double> row(std::size_t i) const { return density.row(i); }
};

namespace detail {

/// Folds mode k onto the DST-I bins of an M-interval grid. Returns the bin
/// (1..M-1) and a sign, or bin 0 when the mode vanishes on every node.
inline std::pair<std::size_t, double> alias_bin(long k, long M) {
    const long r = k % (2 * M);
    if (r == 0 || r == M) return {0, 0.0};
    if (r < M) return {static_cast<std::size_t>(r), 1.0};
    return {static_cast<std::size_t>(2 * M - r), -1.0};
}

/// Evaluates orbital amplitudes on the grid nodes from mode coefficients.
class NodeEvaluator {
public:
    explicit NodeEvaluator(const SpaceGrid& grid)
        : grid_(grid), dst_(grid.interior_count()), bins_(grid.interior_count()), vals_(grid.interior_count()) {}

    /// Adds w |sum_k a_k phi_k(x_j)|^2 to out (size node_count).
    void accumulate(std::span<const double> amp, std::span<const std::complex<double>> phase, double w,
                    std::span<double> out) {
        std::fill(bins_.begin(), bins_.end(), std::complex<double>{});
        const long M = grid_.n_points();
        for (std::size_t k = 0; k < amp.size(); ++k) {
            if (amp[k] == 0.0) continue;
            const auto [bin, sign] = alias_bin(static_cast<long>(k) + 1, M);
            if (bin == 0) continue;
            bins_[bin - 1] += sign * amp[k] * phase[k];
        }
        dst_.inverse(bins_, vals_);
        for (std::size_t j = 0; j < vals_.size(); ++j) out[j + 1] += w * std::norm(vals_[j]);
    }

private:
    SpaceGrid grid_;
    SineTransform dst_;
    std::vector<std::complex<double>> bins_;
    std::vector<std::complex<double>> vals_;
};

inline void density_row(const SpectralState& s, double t, detail::NodeEvaluator& ev, std::span<double> out) {
    if (!(t >= 0.0)) throw DomainError("evolve_density: t must be >= 0");
    std::fill(out.begin(), out.end(), 0.0);
    const auto phase = mode_phases(s.k_max(), t);
    for (int n = 0; n < s.orbitals(); ++n) {
        const double w = s.weight(n);
        if (w == 0.0) continue;
        ev.accumulate(s.lambda.row(static_cast<std::size_t>(n)), phase, w, out);
    }
}

}  // namespace detail

/// n(x_j, t) on every grid node.
///
/// Modes above the grid's Nyquist index are folded onto the sampled ones,
/// so the node values are exact for any K_max.
inline std::vector<double> evolve_density(const SpectralState& s, double t, const SpaceGrid& grid) {
    detail::NodeEvaluator ev(grid);
    std::vector<double> out(grid.node_count());
    detail::density_row(s, t, ev, out);
    return out;
}

/// Complex orbital amplitudes phi_n(x, t) at arbitrary positions by direct
/// summation over modes. Rows are orbitals, columns positions.
inline Matrix<std::complex<double>> orbitals_at(const SpectralState& s, double t, std::span<const double> xs) {
    if (!(t >= 0.0)) throw DomainError("orbitals_at: t must be >= 0");
    const auto phase = detail::mode_phases(s.k_max(), t);
    Matrix<std::complex<double>> out(static_cast<std::size_t>(s.orbitals()), xs.size());
    constexpr int reseed = 64;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (!(x >= 0.0 && x <= units::box_length)) throw DomainError("orbitals_at: x outside [0, L]");
        const double theta = units::pi * x / units::box_length;
        const std::complex<double> step{std::cos(theta), std::sin(theta)};
        // sin(k theta) for all k by rotation, reseeded to bound drift.
        std::vector<double> s_k(static_cast<std::size_t>(s.k_max()));
        std::complex<double> z{1.0, 0.0};
        for (int k = 1; k <= s.k_max(); ++k) {
            if (k % reseed == 0) {
                z = {std::cos(k * theta), std::sin(k * theta)};
            } else {
                z *= step;
            }
            s_k[static_cast<std::size_t>(k) - 1] = std::sqrt(2.0) * z.imag();
        }
        if (x == 0.0 || x == units::box_length) std::fill(s_k.begin(), s_k.end(), 0.0);
        for (int n = 0; n < s.orbitals(); ++n) {
            auto lam = s.lambda.row(static_cast<std::size_t>(n));
            std::complex<double> acc{};
            for (std::size_t k = 0; k < lam.size(); ++k) acc += lam[k] * s_k[k] * phase[k];
            out(static_cast<std::size_t>(n), i) = acc;
        }
    }
    return out;
}

/// n(x, t) at arbitrary positions by direct summation over modes.
inline std::vector<double> density_at(const SpectralState& s, double t, std::span<const double> xs) {
    const auto amp = orbitals_at(s, t, xs);
    std::vector<double> out(xs.size(), 0.0);
    for (int n = 0; n < s.orbitals(); ++n) {
        const double w = s.weight(n);
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] += w * std::norm(amp(static_cast<std::size_t>(n), i));
    }
    return out;
}

/// Evaluates evolve_density on every time, splitting rows across threads.
inline Carpet make_carpet(const SpectralState& s, std::span<const double> times, const SpaceGrid& grid,
                          std::string trap = {}, unsigned threads = 0) {
    for (double t : times) {
        if (!(t >= 0.0 && t <= units::revival_time * (1.0 + 1e-12)))
            throw DomainError("make_carpet: times must lie in [0, T_rev]");
    }
    Carpet c{grid, {times.begin(), times.end()}, Matrix<double>(times.size(), grid.node_count()),
             s.atom_number(), std::move(trap), s.k_max()};
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, times.size())));

    auto work = [&](unsigned id) {
        detail::NodeEvaluator ev(grid);
        for (std::size_t i = id; i < times.size(); i += threads) detail::density_row(s, times[i], ev, c.density.row(i));
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    }
    return c;
}

/// Uniform time grid t_i = i * t_end / (n - 1), i = 0..n-1.
inline std::vector<double> uniform_times(double t_end, std::size_t n) {
    if (n < 1) throw DomainError("uniform_times: need at least one time");
    std::vector<double> t(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

}  // namespace fcarpet
