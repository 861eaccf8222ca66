#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/trap.hpp"
#include "fcarpet/core/units.hpp"

namespace fcarpet {

/// External potential on [0, L]; +infinity marks forbidden regions.
using Potential = std::function<double(double)>;

inline Potential potential_of(const SubBox& s) {
    return [D = s.D](double x) { return x <= D ? 0.0 : std::numeric_limits<double>::infinity(); };
}

inline Potential potential_of(const Harmonic& h) {
    return [h](double x) { return 0.5 * h.omega * h.omega * (x - h.center) * (x - h.center); };
}

struct ThomasFermiResult {
    double mu = 0.0;
    std::vector<double> density;  // sampled on the grid passed in
};

/// Options for the phase-space integral.
struct TFOptions {
    int scan_cells = 4096;   // resolution of the search for classically allowed intervals
    double rel_tol = 1e-10;  // on mu
    int max_iter = 400;
};

namespace detail {

inline double tf_density(double mu, double v) {
    const double e = mu - v;
    return e > 0 ? std::sqrt(2.0 * e) / units::pi : 0.0;
}

/// Root of mu - v(x) on [a, b] where the sign changes, by bisection.
inline double turning_point(const Potential& v, double mu, double a, double b) {
    const bool inside_a = mu - v(a) > 0;
    for (int i = 0; i < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, b); ++i) {
        const double m = 0.5 * (a + b);
        if ((mu - v(m) > 0) == inside_a) {
            a = m;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// Classically allowed intervals {x : v(x) < mu} in [0, L].
inline std::vector<std::pair<double, double>> allowed_intervals(const Potential& v, double mu, int cells) {
    std::vector<std::pair<double, double>> out;
    const double L = units::box_length;
    const double h = L / cells;
    bool inside = mu - v(0.0) > 0;
    double start = 0.0;
    for (int i = 1; i <= cells; ++i) {
        const double x0 = (i - 1) * h, x1 = i * h;
        const bool now = mu - v(x1) > 0;
        if (now != inside) {
            const double xc = turning_point(v, mu, x0, x1);
            if (now) {
                start = xc;
            } else {
                out.emplace_back(start, xc);
            }
            inside = now;
        }
    }
    if (inside) out.emplace_back(start, L);
    return out;
}

/// Phase-space count (1/pi) int sqrt(2 (E - v)) dx over the allowed region.
inline double state_count(const Potential& v, double E, int cells) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    double total = 0.0;
    auto f = [&v, E](double x) { return tf_density(E, v(x)); };
    for (const auto& iv : allowed_intervals(v, E, cells)) {
        if (iv.second <= iv.first) continue;
        total += integrator.integrate(f, iv.first, iv.second);
    }
    return total;
}

inline double potential_minimum(const Potential& v, int cells) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= cells; ++i) m = std::min(m, v(units::box_length * i / cells));
    if (!std::isfinite(m)) throw DomainError("thomas_fermi: potential is infinite everywhere");
    return m;
}

/// Smallest E with state_count(E) = target, by bracketing and bisection.
inline double invert_count(const Potential& v, double target, const TFOptions& opt) {
    if (!(target > 0)) throw DomainError("thomas_fermi: count must be positive");
    const double vmin = potential_minimum(v, opt.scan_cells);
    double lo = vmin;
    double span = 1.0;
    double hi = vmin + span;
    int guard = 0;
    while (state_count(v, hi, opt.scan_cells) < target) {
        lo = hi;
        span *= 4.0;
        hi = vmin + span;
        if (++guard > 200) throw NumericError("thomas_fermi: failed to bracket the chemical potential");
    }
    for (int i = 0; i < opt.max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (state_count(v, mid, opt.scan_cells) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= opt.rel_tol * 1e-3 * std::max(std::abs(hi), 1e-300)) return 0.5 * (lo + hi);
    }
    throw NumericError("thomas_fermi: bisection did not converge");
}

}  // namespace detail

/// Chemical potential of the local-density profile n = sqrt(2 (mu - v)) / pi
/// holding N atoms, and that profile sampled on `grid`.
inline ThomasFermiResult thomas_fermi_mu(const Potential& v, double N, const SpaceGrid& grid,
                                         const TFOptions& opt = {}) {
    if (!(N >= 1)) throw DomainError("thomas_fermi_mu: N must be >= 1");
    ThomasFermiResult r;
    r.mu = detail::invert_count(v, N, opt);
    r.density.resize(grid.node_count());
    for (std::size_t j = 0; j < r.density.size(); ++j) r.density[j] = detail::tf_density(r.mu, v(grid.x(j)));
    return r;
}

/// Semiclassical levels solving n + C = (1/pi) int sqrt(2 (E_n - v)) dx for
/// n = 1..n_max. This is the normalization condition of thomas_fermi_mu with
/// N replaced by n + C, so E_n(n) and mu(N) are the same function.
inline std::vector<double> wkb_spectrum(const Potential& v, int n_max, double C, const TFOptions& opt = {}) {
    if (n_max < 1) throw DomainError("wkb_spectrum: n_max must be >= 1");
    if (!(1.0 + C > 0)) throw DomainError("wkb_spectrum: require 1 + C > 0");
    std::vector<double> E(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) E[static_cast<std::size_t>(n) - 1] = detail::invert_count(v, n + C, opt);
    return E;
}

}  // namespace fcarpet
