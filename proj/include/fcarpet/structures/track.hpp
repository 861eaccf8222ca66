#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <span>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/units.hpp"
#include "fcarpet/idealgas/evolution.hpp"

namespace fcarpet {

struct StructureSample {
    double t = 0.0;
    double x = 0.0;      // peak position
    double depth = 0.0;  // (extremum - N/L) / (N/L)
    double width = 0.0;  // FWHM, NaN if a half-depth crossing is missing
    bool found = false;
};

struct StructureTrack {
    int p = 0;
    std::vector<StructureSample> samples;
    double velocity_fit = 0.0;

    [[nodiscard]] std::vector<StructureSample> found() const {
        std::vector<StructureSample> out;
        for (const auto& s : samples)
            if (s.found) out.push_back(s);
        return out;
    }
};

/// Unfolded trajectory of the p-th contribution: p v0 t for right-movers,
/// L + p v0 t for left-movers.
inline double unfolded_position(int p, double t) {
    if (p == 0) throw DomainError("structure: p must be nonzero");
    const double u = p * units::v0 * t;
    return p > 0 ? u : units::box_length + u;
}

/// Triangle map folding an unfolded coordinate into [0, L] by wall reflections.
inline double fold_into_box(double u) {
    const double L = units::box_length;
    double r = std::fmod(u, 2 * L);
    if (r < 0) r += 2 * L;
    return r <= L ? r : 2 * L - r;
}

/// Predicted peak position of the p-th contribution at time t.
inline double predicted_position(int p, double t) { return fold_into_box(unfolded_position(p, t)); }

/// Inverse of fold_into_box on the branch that contains `u_ref`.
inline double unfold_like(double x, double u_ref) {
    const double L = units::box_length;
    const double q = std::floor(u_ref / (2 * L));
    const double r = u_ref - 2 * L * q;
    return 2 * L * q + (r <= L ? x : 2 * L - x);
}

namespace detail {

inline double crossing(double x0, double y0, double x1, double y1, double level) {
    return x0 + (level - y0) / (y1 - y0) * (x1 - x0);
}

/// Full width at half depth of the extremum at index i of dev = n - background,
/// walking outwards to the nearest half-depth crossings.
inline double fwhm_at(std::span<const double> xs, std::span<const double> dev, std::size_t i) {
    const double half = 0.5 * dev[i];
    auto beyond = [half](double v) { return half < 0 ? v >= half : v <= half; };
    std::size_t l = i;
    while (l > 0 && !beyond(dev[l])) --l;
    std::size_t r = i;
    while (r + 1 < dev.size() && !beyond(dev[r])) ++r;
    if (!beyond(dev[l]) || !beyond(dev[r])) return std::nan("");
    const double xl = crossing(xs[l], dev[l], xs[l + 1], dev[l + 1], half);
    const double xr = crossing(xs[r - 1], dev[r - 1], xs[r], dev[r], half);
    return xr - xl;
}

/// Extremum of the expected sign (-1 dip, +1 peak, 0 either) in [lo, hi].
inline std::optional<std::size_t> extremum(std::span<const double> dev, std::size_t lo, std::size_t hi, int sign) {
    std::optional<std::size_t> best;
    double best_v = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
        const double v = sign == 0 ? std::abs(dev[j]) : sign * dev[j];
        if (v > best_v) {
            best_v = v;
            best = j;
        }
    }
    return best;
}

inline double fit_velocity(int p, const std::vector<StructureSample>& samples) {
    double st = 0, su = 0, stt = 0, stu = 0;
    int n = 0;
    for (const auto& s : samples) {
        if (!s.found) continue;
        const double u = unfold_like(s.x, unfolded_position(p, s.t));
        st += s.t;
        su += u;
        stt += s.t * s.t;
        stu += s.t * u;
        ++n;
    }
    if (n < 2) return std::nan("");
    const double den = n * stt - st * st;
    return den != 0 ? (n * stu - st * su) / den : std::nan("");
}

}  // namespace detail

struct TrackOptions {
    int window = 5;          // search half-width in grid cells
    int expected_sign = -1;  // -1 dip, +1 peak, 0 either
    int wall_margin = 5;     // skip samples this many cells from a wall
};

/// Follows the p-th structure through a carpet along x0 = p v0 t (folded at
/// the walls). Depths are relative to the mean density N/L.
inline StructureTrack track_structure(const Carpet& c, int p, const TrackOptions& opt = {}) {
    StructureTrack tr;
    tr.p = p;
    const double background = c.N / units::box_length;
    if (!(background > 0)) throw DomainError("track_structure: carpet has no atoms");
    const auto xs = c.grid.nodes();
    const double dx = c.grid.dx();
    const std::size_t last = c.grid.node_count() - 1;
    std::vector<double> dev(c.grid.node_count());
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        StructureSample s;
        s.t = c.times[i];
        const double x0 = predicted_position(p, s.t);
        const auto j0 = static_cast<long>(std::lround(x0 / dx));
        if (j0 < opt.wall_margin || j0 > static_cast<long>(last) - opt.wall_margin) {
            tr.samples.push_back(s);
            continue;
        }
        auto row = c.row(i);
        for (std::size_t j = 0; j < dev.size(); ++j) dev[j] = row[j] - background;
        const auto lo = static_cast<std::size_t>(std::max<long>(1, j0 - opt.window));
        const auto hi = static_cast<std::size_t>(std::min<long>(static_cast<long>(last) - 1, j0 + opt.window));
        if (const auto k = detail::extremum(dev, lo, hi, opt.expected_sign)) {
            s.found = true;
            s.x = xs[*k];
            s.depth = dev[*k] / background;
            s.width = detail::fwhm_at(xs, dev, *k);
        }
        tr.samples.push_back(s);
    }
    tr.velocity_fit = detail::fit_velocity(p, tr.samples);
    return tr;
}

struct RefinedTrackOptions {
    double half_window = 0.01;  // in units of L
    int points = 601;           // samples across the window
    int expected_sign = -1;
};

/// Like track_structure, but evaluates the density directly on a fine local
/// window around the prediction, which resolves structures thinner than the
/// carpet grid.
inline StructureTrack track_structure_refined(const SpectralState& s, int p, std::span<const double> times,
                                              const RefinedTrackOptions& opt = {}) {
    if (opt.points < 5) throw DomainError("track_structure_refined: need at least 5 points");
    StructureTrack tr;
    tr.p = p;
    const double background = s.atom_number() / units::box_length;
    std::vector<double> xs(static_cast<std::size_t>(opt.points)), dev(xs.size());
    for (double t : times) {
        StructureSample smp;
        smp.t = t;
        const double x0 = predicted_position(p, t);
        if (x0 - opt.half_window < 0.0 || x0 + opt.half_window > units::box_length) {
            tr.samples.push_back(smp);
            continue;
        }
        for (std::size_t j = 0; j < xs.size(); ++j)
            xs[j] = x0 - opt.half_window + 2 * opt.half_window * static_cast<double>(j) / (xs.size() - 1);
        const auto n = density_at(s, t, xs);
        for (std::size_t j = 0; j < xs.size(); ++j) dev[j] = n[j] - background;
        // Restrict the extremum search to the central half so the nearest
        // side lobes are not mistaken for the structure.
        const std::size_t q = xs.size() / 4;
        if (const auto k = detail::extremum(dev, q, xs.size() - 1 - q, opt.expected_sign)) {
            smp.found = true;
            smp.x = xs[*k];
            smp.depth = dev[*k] / background;
            smp.width = detail::fwhm_at(xs, dev, *k);
        }
        tr.samples.push_back(smp);
    }
    tr.velocity_fit = detail::fit_velocity(p, tr.samples);
    return tr;
}

/// Sample times spread quasi-uniformly over [t0, t1] by the golden-ratio
/// sequence, which avoids rational fractions of the revival time.
inline std::vector<double> generic_times(double t0, double t1, int count) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        double f = (i + 1) * g;
        f -= std::floor(f);
        t[static_cast<std::size_t>(i)] = t0 + f * (t1 - t0);
    }
    return t;
}

inline double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
    if (v.empty()) return std::nan("");
    const auto mid = v.begin() + static_cast<long>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace fcarpet
