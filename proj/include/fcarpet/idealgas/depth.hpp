#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/occupancy.hpp"
#include "fcarpet/core/units.hpp"
#include "fcarpet/idealgas/spectral_state.hpp"

namespace fcarpet {

/// Sign of the p-th traveling contribution: -1 for right-movers, and
/// (-1)^(|p| mod 2 + 1) for left-movers.
inline double depth_sign(int p) {
    if (p == 0) throw DomainError("depth: p must be nonzero");
    if (p > 0) return -1.0;
    return (std::abs(p) % 2 == 1) ? 1.0 : -1.0;
}

struct DepthReport {
    int p = 0;
    double d_direct = 0.0;
    double d_sinc = 0.0;
    double d_fourier = 0.0;
    std::optional<std::vector<double>> per_orbital;
    std::vector<std::string> warnings;
};

/// sigma(p) (1/N) sum_n w_n sum_k lambda(n,k) lambda(n,k+|p|).
inline double contribution_depth_direct(const SpectralState& s, int p) {
    const double sign = depth_sign(p);
    const int q = std::abs(p);
    if (q >= s.k_max()) throw DomainError("contribution_depth_direct: |p| must be < K_max");
    std::vector<double> rows(static_cast<std::size_t>(s.orbitals()));
    std::vector<double> prod(static_cast<std::size_t>(s.k_max() - q));
    for (int n = 0; n < s.orbitals(); ++n) {
        auto lam = s.lambda.row(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = lam[k] * lam[k + static_cast<std::size_t>(q)];
        rows[static_cast<std::size_t>(n)] = s.weight(n) * pairwise_sum(prod);
    }
    return sign * pairwise_sum(rows) / s.atom_number();
}

/// Closed form sigma(p) sinc(D |p| pi / L) of the sub-box release.
inline double contribution_depth_sinc(double D, int p) {
    if (!(D > 0 && D <= units::box_length)) throw DomainError("contribution_depth_sinc: require 0 < D <= L");
    return depth_sign(p) * sinc(D * std::abs(p) * units::pi / units::box_length);
}

/// sigma(p) (1/N) int n(x, 0) cos(|p| pi x / L) dx by trapezoidal quadrature,
/// with N taken from the same quadrature.
inline double contribution_depth_fourier(std::span<const double> density, const SpaceGrid& grid, int p) {
    const double sign = depth_sign(p);
    const double q = std::abs(p) * units::pi / units::box_length;
    std::vector<double> f(density.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = density[j] * std::cos(q * grid.x(j));
    const double N = grid.integrate(density);
    if (!(N > 0)) throw DomainError("contribution_depth_fourier: density must have positive mass");
    return sign * grid.integrate(f) / N;
}

/// Depth carried by the n-th sub-box orbital alone,
/// sigma(p) sinc(a) 4 n^2 pi^2 / ((2 n pi)^2 - a^2) with a = D |p| pi / L.
///
/// At 2 n pi = a the expression is 0/0; the limit -sigma(p)/2 is returned.
inline double per_orbital_depth(double D, int n, int p) {
    if (!(D > 0 && D <= units::box_length)) throw DomainError("per_orbital_depth: require 0 < D <= L");
    if (n < 1) throw DomainError("per_orbital_depth: n must be >= 1");
    const double sign = depth_sign(p);
    const double b = 2.0 * n * units::pi;
    const double a = D * std::abs(p) * units::pi / units::box_length;
    if (std::abs(b - a) <= 1e-12 * b) return -0.5 * sign;
    // sinc(a) b^2 / (b^2 - a^2) = sin(a) b^2 / (a (b - a)(b + a)), and sin(a) = -sin(b - a)
    // since b is a multiple of 2 pi; this keeps full precision near the resonance.
    return sign * (-std::sin(b - a)) * b * b / (a * (b - a) * (b + a));
}

/// Exact initial density sum_n w_n (2/D) sin^2(n pi x / D) of a sub-box
/// Fermi sea on every grid node (zero beyond D).
inline std::vector<double> subbox_density(double D, const Occupancy& occ, const SpaceGrid& grid) {
    std::vector<double> n(grid.node_count(), 0.0);
    for (std::size_t j = 0; j < n.size(); ++j) {
        const double x = grid.x(j);
        if (x >= D) continue;
        for (std::size_t i = 0; i < occ.weights.size(); ++i) {
            const double s = std::sin(static_cast<double>(i + 1) * units::pi * x / D);
            n[j] += occ.weights[i] * 2.0 / D * s * s;
        }
    }
    return n;
}

/// All three routes plus optional per-orbital depths for a sub-box release.
inline DepthReport depth_report(const SpectralState& s, double D, std::span<const double> density0,
                                const SpaceGrid& grid, int p, bool per_orbital = false) {
    DepthReport r;
    r.p = p;
    r.d_direct = contribution_depth_direct(s, p);
    r.d_sinc = contribution_depth_sinc(D, p);
    r.d_fourier = contribution_depth_fourier(density0, grid, p);
    r.warnings = s.warnings;
    if (per_orbital) {
        std::vector<double> d(static_cast<std::size_t>(s.orbitals()));
        for (int n = 1; n <= s.orbitals(); ++n) d[static_cast<std::size_t>(n) - 1] = per_orbital_depth(D, n, p);
        r.per_orbital = std::move(d);
    }
    return r;
}

}  // namespace fcarpet
