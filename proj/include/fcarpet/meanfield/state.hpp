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

namespace fcarpet {

using cplx = std::complex<double>;

/// Two-component Hartree-Fock state. Each orbital is stored on all grid
/// nodes; the wall nodes stay exactly zero.
struct MeanFieldState {
    SpaceGrid grid;
    Matrix<cplx> plus;   // rows: orbitals
    Matrix<cplx> minus;
    double t = 0.0;
    double g = 0.0;

    [[nodiscard]] int per_component() const noexcept { return static_cast<int>(plus.rows()); }
    [[nodiscard]] int atom_number() const noexcept { return static_cast<int>(plus.rows() + minus.rows()); }
};

/// Density of one component on every node.
inline std::vector<double> component_density(const Matrix<cplx>& orbitals) {
    std::vector<double> n(orbitals.cols(), 0.0);
    for (std::size_t a = 0; a < orbitals.rows(); ++a) {
        auto row = orbitals.row(a);
        for (std::size_t j = 0; j < n.size(); ++j) n[j] += std::norm(row[j]);
    }
    return n;
}

/// Trapezoidal overlap <a|b> of two sampled orbitals.
inline cplx inner_product(std::span<const cplx> a, std::span<const cplx> b, const SpaceGrid& grid) {
    std::vector<double> re(a.size()), im(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        const cplx v = std::conj(a[j]) * b[j];
        re[j] = v.real();
        im[j] = v.imag();
    }
    return {grid.integrate(re), grid.integrate(im)};
}

/// Lowest N/2 box states of [0, L/2] for the plus component and of [L/2, L]
/// for the minus component, side by side with no overlap.
inline MeanFieldState init_separated(int N, const SpaceGrid& grid, double g = 0.0) {
    if (N < 2 || N % 2 != 0) throw DomainError("init_separated: N must be even and >= 2, got " + std::to_string(N));
    if (grid.n_points() % 2 != 0) throw DomainError("init_separated: n_points must be even");
    const int half = N / 2;
    if (half > grid.n_points() / 8) {
        throw DomainError("init_separated: N/2 must be <= n_points/8 (N/2=" + std::to_string(half) +
                          ", n_points=" + std::to_string(grid.n_points()) + ")");
    }
    MeanFieldState s{grid, Matrix<cplx>(static_cast<std::size_t>(half), grid.node_count()),
                     Matrix<cplx>(static_cast<std::size_t>(half), grid.node_count()), 0.0, g};
    const std::size_t mid = static_cast<std::size_t>(grid.n_points() / 2);
    const double len = 0.5 * units::box_length;
    const double amp = std::sqrt(2.0 / len);
    for (int n = 1; n <= half; ++n) {
        const auto r = static_cast<std::size_t>(n - 1);
        for (std::size_t j = 1; j < mid; ++j) {
            // Integer arithmetic for the phase keeps the two halves exact mirrors.
            const double v = amp * std::sin(units::pi * n * static_cast<double>(j) / static_cast<double>(mid));
            s.plus(r, j) = v;
            s.minus(r, grid.node_count() - 1 - j) = (n % 2 == 1 ? v : -v);
        }
    }
    return s;
}

}  // namespace fcarpet
