#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/core/units.hpp"
#include "fcarpet/meanfield/state.hpp"

namespace fcarpet {

enum class Component { plus, minus };

/// Normalized one-body density matrix g1(x_i, x_j) of one component.
/// Entries on masked rows or columns are zero.
struct CoherenceMap {
    SpaceGrid grid;
    Matrix<cplx> values;
    std::vector<char> unmasked;  // per node: density above the floor

    [[nodiscard]] bool valid(std::size_t i) const { return unmasked[i] != 0; }
};

/// Density floor below which g1 is not evaluated, relative to the mean density.
inline constexpr double g1_density_floor = 1e-12;

/// g1 of the Slater determinant whose orbitals are the rows of `orbitals`,
/// sampled on every node of `grid`.
inline CoherenceMap g1_map(const Matrix<cplx>& orbitals, const SpaceGrid& grid) {
    if (orbitals.cols() != grid.node_count()) throw DomainError("g1_map: orbitals must be sampled on every grid node");
    const std::size_t n = grid.node_count();
    std::vector<double> dens(n, 0.0);
    for (std::size_t a = 0; a < orbitals.rows(); ++a) {
        auto row = orbitals.row(a);
        for (std::size_t j = 0; j < n; ++j) dens[j] += std::norm(row[j]);
    }
    const double floor = g1_density_floor * static_cast<double>(orbitals.rows()) / units::box_length;
    CoherenceMap m{grid, Matrix<cplx>(n, n), std::vector<char>(n, 0)};
    std::vector<double> inv(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (dens[j] > floor) {
            m.unmasked[j] = 1;
            inv[j] = 1.0 / std::sqrt(dens[j]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!m.valid(i)) continue;
        for (std::size_t j = i; j < n; ++j) {
            if (!m.valid(j)) continue;
            cplx acc{};
            for (std::size_t a = 0; a < orbitals.rows(); ++a) acc += std::conj(orbitals(a, i)) * orbitals(a, j);
            acc *= inv[i] * inv[j];
            m.values(i, j) = acc;
            m.values(j, i) = std::conj(acc);
        }
        m.values(i, i) = 1.0;
    }
    return m;
}

inline CoherenceMap g1_map(const MeanFieldState& s, Component c = Component::plus) {
    return g1_map(c == Component::plus ? s.plus : s.minus, s.grid);
}

/// Vertex u0(t) of the first rectangle on the wall y = 0: a triangle wave
/// sweeping [0, L] at speed 2 v0, so the path collapses onto the diagonal
/// every T_rev / 2 and onto the anti-diagonal in between.
inline double vertex_path(double t) {
    if (!(t >= 0)) throw DomainError("vertex_path: t must be >= 0");
    const double s = 4.0 * t / units::revival_time;
    const double f = std::floor(s);
    const double frac = s - f;
    const bool even = std::fmod(f, 2.0) == 0.0;
    return (even ? frac : 1.0 - frac) * units::box_length;
}

struct CoherenceValue {
    double G = 0.0;
    double skipped_fraction = 0.0;  // share of path length with no unmasked partner
    bool flagged = false;           // more than 10% of the path skipped
};

/// Path integral of |g1| along the two sides of the first rectangle,
///     int_0^u0 |g1(u, u0 - u)| du + int_u0^L |g1(u, u - u0)| du,
/// by trapezoidal quadrature over the nodes u = x_i. At each node the
/// partner index is scanned over +-search cells and the largest modulus
/// taken. Masked stretches are dropped and the result is rescaled by the
/// retained path length.
inline CoherenceValue coherence_measure(const CoherenceMap& map, double t, int search = 3) {
    const SpaceGrid& g = map.grid;
    const std::size_t n = g.node_count();
    const double dx = g.dx();
    const double u0 = vertex_path(t);
    std::vector<double> f(n, 0.0);
    std::vector<char> ok(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!map.valid(i)) continue;
        const double x = static_cast<double>(i) * dx;
        const double y = x <= u0 ? u0 - x : x - u0;
        const long jc = std::lround(y / dx);
        double best = -1.0;
        for (long o = -search; o <= search; ++o) {
            const long j = jc + o;
            if (j < 0 || j >= static_cast<long>(n) || !map.valid(static_cast<std::size_t>(j))) continue;
            best = std::max(best, std::abs(map.values(i, static_cast<std::size_t>(j))));
        }
        if (best >= 0) {
            f[i] = best;
            ok[i] = 1;
        }
    }
    double integral = 0.0, kept = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!ok[i] || !ok[i + 1]) continue;
        integral += 0.5 * dx * (f[i] + f[i + 1]);
        kept += dx;
    }
    CoherenceValue v;
    const double total = units::box_length;
    v.skipped_fraction = 1.0 - kept / total;
    v.flagged = v.skipped_fraction > 0.1;
    v.G = kept > 0 ? integral * total / kept : 0.0;
    return v;
}

}  // namespace fcarpet
