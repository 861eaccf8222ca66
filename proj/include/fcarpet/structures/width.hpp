#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/occupancy.hpp"
#include "fcarpet/core/trap.hpp"
#include "fcarpet/core/units.hpp"
#include "fcarpet/idealgas/depth.hpp"

namespace fcarpet {

/// Full width at half maximum of sinc, in units of its argument scale.
inline constexpr double w0 = 3.79098;

/// 2u with sinc(u) = 1/2, solved numerically; agrees with w0 to its digits.
inline double sinc_half_width() {
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t it = 100;
    const auto r = boost::math::tools::toms748_solve([](double u) { return sinc(u) - 0.5; }, 1.0, 3.0, tol, it);
    return r.first + r.second;
}

struct WidthModel {
    double eta = 2.0;
    double kF = 1.0;
    [[nodiscard]] double width() const { return w0 / (eta * kF); }
};

/// Model deviation (N/L) d_p sinc(eta kF x_p) near the p-th structure.
inline double sinc_profile(double x_p, double d_p, double kF, double eta, double N) {
    return N / units::box_length * d_p * sinc(eta * kF * x_p);
}

/// Fermi wavevector of the initial trap from the continuum density of states.
inline double fermi_wavevector(const TrapSpec& trap, double N) {
    validate(trap);
    const double pi = units::pi;
    return std::visit(
        overloaded{
            [N, pi](const SubBox& s) { return pi * N / s.D; },
            [](const Harmonic&) -> double {
                throw DomainError("fermi_wavevector: no closed form for the harmonic trap");
            },
            [N, pi](const SubBox3D& s) {
                return std::visit(overloaded{
                                      [&](const BoxBox& b) {
                                          return std::cbrt(0.75 * pi * pi * N / (s.D * b.Dy * b.Dz));
                                      },
                                      [&](const HarmBox& h) {
                                          return std::pow(16 * pi * h.omega_y * N / (s.D * h.Dz), 0.25);
                                      },
                                      [&](const HarmHarm& h) {
                                          return std::pow(15 * pi * h.omega_y * h.omega_z * N / s.D, 0.2);
                                      },
                                  },
                                  s.perp);
            },
        },
        trap);
}

/// sum_{n=1}^{N} cos(2 n pi x / D) in closed form,
/// -1/2 + sin((N + 1/2) 2 pi x / D) / (2 sin(pi x / D)).
inline double lagrange_sum(int N, double x, double D) {
    if (N < 0) throw DomainError("lagrange_sum: N must be >= 0");
    const double r = x / D - std::round(x / D);  // distance to the nearest multiple of D, in units of D
    const double s = std::sin(units::pi * r);
    if (std::abs(r) < 1e-6) {
        const double n = N;
        // Taylor expansion of sum cos(2 n pi r) about r = 0.
        return n - 2 * units::pi * units::pi * r * r * n * (n + 1) * (2 * n + 1) / 6;
    }
    return -0.5 + std::sin((N + 0.5) * 2 * units::pi * r) / (2 * s);
}

/// Relative structure shape (1/N) sum_n w_n cos(2 n pi x / D), equal to 1 at
/// x = 0; the structure's deviation is d_p N/L times this profile.
inline double structure_profile(const Occupancy& occ, double D, double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < occ.weights.size(); ++i)
        s += occ.weights[i] * std::cos(2.0 * static_cast<double>(i + 1) * units::pi * x / D);
    return s / occ.total();
}

/// FWHM of structure_profile: twice the first half-height crossing from x = 0,
/// NaN when none occurs within D/2.
inline double profile_fwhm(const Occupancy& occ, double D, int scan = 20000) {
    const double x_end = 0.5 * D;
    double xa = 0.0, fa = structure_profile(occ, D, 0.0) - 0.5;
    for (int i = 1; i <= scan; ++i) {
        double xb = x_end * i / scan;
        const double fb = structure_profile(occ, D, xb) - 0.5;
        if (fa > 0 && fb <= 0) {
            for (int k = 0; k < 100 && xb - xa > 1e-15 * D; ++k) {
                const double xm = 0.5 * (xa + xb);
                (structure_profile(occ, D, xm) - 0.5 > 0 ? xa : xb) = xm;
            }
            return xa + xb;
        }
        xa = xb;
        fa = fb;
    }
    return std::nan("");
}

struct EtaFit {
    double eta = 0.0;
    double residual = 0.0;  // rms misfit relative to the unit peak
    std::vector<std::string> warnings;
};

/// Least-squares eta for samples of a structure normalized to 1 at its peak
/// (xs are offsets from the peak). The fit window |x| <= pi / (eta kF) moves
/// with eta; points outside it are ignored.
inline EtaFit fit_eta(std::span<const double> xs, std::span<const double> profile, double kF, double eta_lo = 0.5,
                      double eta_hi = 6.0) {
    if (xs.size() != profile.size() || xs.size() < 5) throw DomainError("fit_eta: need >= 5 matching samples");
    if (!(kF > 0)) throw DomainError("fit_eta: kF must be > 0");
    auto cost = [&](double eta) {
        const double lim = units::pi / (eta * kF);
        double s = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::abs(xs[i]) > lim) continue;
            const double d = profile[i] - sinc(eta * kF * xs[i]);
            s += d * d;
            ++n;
        }
        return n > 0 ? s / n : 1e300;
    };
    std::uintmax_t it = 200;
    const auto r = boost::math::tools::brent_find_minima(cost, eta_lo, eta_hi, 40, it);
    EtaFit f;
    f.eta = r.first;
    f.residual = std::sqrt(r.second);
    if (f.residual > 0.2) f.warnings.push_back("poor sinc fit: residual " + std::to_string(f.residual));
    return f;
}

/// Convenience: fit eta to the synthesized profile of an occupancy.
inline EtaFit fit_eta(const Occupancy& occ, double D, double kF, int samples = 401) {
    const double span = units::pi / (0.5 * kF);
    std::vector<double> xs(static_cast<std::size_t>(samples)), y(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = -span + 2 * span * static_cast<double>(i) / (xs.size() - 1);
        y[i] = structure_profile(occ, D, xs[i]);
    }
    return fit_eta(xs, y, kF);
}

struct WidthPoint {
    double T = 0.0;
    double width = 0.0;
    double ratio = 0.0;  // width / width at T = 0
    double depth = 0.0;  // d_p from the occupancy-weighted per-orbital depths
    bool censored = false;
};

/// Longitudinal occupancy of a sub-box trap at temperature T (units of T_F).
inline Occupancy thermal_occupancy(const TrapSpec& trap, int N, double T) {
    validate(trap);
    if (const auto* s = std::get_if<SubBox>(&trap)) {
        const auto levels = box_levels_for_temperature(s->D, N, T);
        return fermi_dirac_occupancy(levels, N, T);
    }
    if (const auto* s = std::get_if<SubBox3D>(&trap)) {
        if (T == 0.0) return fermi_sea_3d(*s, N);
        const auto levels = spectrum_3d_for_temperature(*s, N, T);
        return fermi_dirac_occupancy(levels, N, T, perpendicular_ground_energy(s->perp));
    }
    throw DomainError("thermal_occupancy: sub-box traps only");
}

inline double subbox_length(const TrapSpec& trap) {
    if (const auto* s = std::get_if<SubBox>(&trap)) return s->D;
    if (const auto* s = std::get_if<SubBox3D>(&trap)) return s->D;
    throw DomainError("sub-box trap required");
}

/// Occupancy-weighted depth sum_n w_n d_p^n / N.
inline double weighted_depth(const Occupancy& occ, double D, int p) {
    std::vector<double> t(occ.weights.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = occ.weights[i] * per_orbital_depth(D, static_cast<int>(i) + 1, p);
    return pairwise_sum(t) / occ.total();
}

/// Structure width and depth versus temperature for a sub-box release.
inline std::vector<WidthPoint> temperature_width_scan(const TrapSpec& trap, int N, std::span<const double> temperatures,
                                                      int p = 1) {
    const double D = subbox_length(trap);
    std::vector<WidthPoint> out;
    double w_ref = std::nan("");
    for (double T : temperatures) {
        if (!(T >= 0)) throw DomainError("temperature_width_scan: T must be >= 0");
        const auto occ = thermal_occupancy(trap, N, T);
        WidthPoint pt;
        pt.T = T;
        pt.width = profile_fwhm(occ, D);
        pt.depth = weighted_depth(occ, D, p);
        pt.censored = std::isnan(pt.width);
        if (std::isnan(w_ref)) w_ref = profile_fwhm(thermal_occupancy(trap, N, 0.0), D);
        pt.ratio = pt.width / w_ref;
        out.push_back(pt);
    }
    return out;
}

}  // namespace fcarpet
