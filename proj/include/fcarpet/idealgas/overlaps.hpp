#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/core/occupancy.hpp"
#include "fcarpet/core/sine_transform.hpp"
#include "fcarpet/idealgas/spectral_state.hpp"

namespace fcarpet {

inline constexpr double default_truncation_tolerance = 1e-6;

/// Closed-form overlap of the n-th sub-box orbital with the k-th box mode.
///
/// Written as 2 sqrt(D) sinc(pi (kD - n)) n / (n + kD), which equals the
/// textbook (2/pi) sqrt(D) (-1)^(n+1) sin(k pi D) n / (n^2 - (kD)^2) and
/// stays finite through the n = kD resonance, where it gives sqrt(D).
inline double subbox_overlap(double D, int n, int k) {
    const double kd = static_cast<double>(k) * D;
    const double delta = kd - n;
    return 2.0 * std::sqrt(D) * sinc(units::pi * delta) * n / (n + kd);
}

/// Overlaps for the lowest orbitals of a sub-box [0, D] sharing the left wall.
/// Rows carry the weights of `occ` (one row per n_x up to occ.n_max()).
inline SpectralState overlaps_subbox(double D, const Occupancy& occ, int k_max,
                                     double eps_trunc = default_truncation_tolerance) {
    if (!(D > 0 && D <= units::box_length)) throw DomainError("overlaps_subbox: require 0 < D <= L");
    const int n_orb = occ.n_max();
    if (n_orb < 1) throw DomainError("overlaps_subbox: empty occupancy");
    if (static_cast<double>(k_max) < 4.0 * n_orb / D) {
        throw DomainError("overlaps_subbox: K_max must be >= 4 N_orb / D");
    }
    SpectralState s;
    s.occupancy = occ;
    s.lambda = Matrix<double>(static_cast<std::size_t>(n_orb), static_cast<std::size_t>(k_max));
    for (int n = 1; n <= n_orb; ++n) {
        auto row = s.lambda.row(static_cast<std::size_t>(n) - 1);
        for (int k = 1; k <= k_max; ++k) row[static_cast<std::size_t>(k) - 1] = subbox_overlap(D, n, k);
    }
    detail::fill_defects(s, eps_trunc);
    return s;
}

inline SpectralState overlaps_subbox(double D, int n_orbitals, int k_max,
                                     double eps_trunc = default_truncation_tolerance) {
    return overlaps_subbox(D, fermi_sea_1d(n_orbitals), k_max, eps_trunc);
}

/// Trapezoidal Gram matrix of sampled real orbitals (rows on all grid nodes).
inline Matrix<double> gram_matrix(const Matrix<double>& orbitals, const SpaceGrid& grid) {
    const std::size_t r = orbitals.rows();
    Matrix<double> g(r, r);
    std::vector<double> prod(grid.node_count());
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a; b < r; ++b) {
            for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = orbitals(a, j) * orbitals(b, j);
            g(a, b) = g(b, a) = grid.integrate(prod);
        }
    }
    return g;
}

/// Overlaps of arbitrary sampled orbitals by trapezoidal quadrature.
///
/// Orbitals are rows sampled on every node of `grid`; they must be
/// orthonormal to 1e-8. Each orbital gets unit weight unless `occ` is given.
inline SpectralState overlaps_numeric(const Matrix<double>& orbitals, const SpaceGrid& grid, int k_max,
                                      double eps_trunc = default_truncation_tolerance) {
    if (orbitals.cols() != grid.node_count()) {
        throw DomainError("overlaps_numeric: orbitals must be sampled on every grid node");
    }
    if (k_max < 1 || static_cast<std::size_t>(k_max) > grid.interior_count()) {
        throw DomainError("overlaps_numeric: K_max must lie in [1, n_points - 1]");
    }
    const auto gram = gram_matrix(orbitals, grid);
    double worst = 0.0;
    std::size_t wa = 0, wb = 0;
    for (std::size_t a = 0; a < gram.rows(); ++a) {
        for (std::size_t b = 0; b < gram.cols(); ++b) {
            const double err = std::abs(gram(a, b) - (a == b ? 1.0 : 0.0));
            if (err > worst) {
                worst = err;
                wa = a;
                wb = b;
            }
        }
    }
    if (worst > 1e-8) {
        std::ostringstream msg;
        msg << "overlaps_numeric: orbitals not orthonormal; worst pair (" << wa + 1 << ", " << wb + 1
            << ") has Gram entry " << gram(wa, wb);
        throw ValidationError(msg.str());
    }

    SpectralState s;
    s.occupancy.weights.assign(orbitals.rows(), 1.0);
    s.occupancy.N = static_cast<double>(orbitals.rows());
    s.lambda = Matrix<double>(orbitals.rows(), static_cast<std::size_t>(k_max));

    // Trapezoid against sqrt(2) sin(k pi x) with vanishing end values is
    // exactly the orthonormal DST-I of the interior samples.
    SineTransform dst(grid.interior_count());
    std::vector<double> interior(grid.interior_count()), coeffs(grid.interior_count());
    for (std::size_t n = 0; n < orbitals.rows(); ++n) {
        const double edge = std::max(std::abs(orbitals(n, 0)), std::abs(orbitals(n, grid.node_count() - 1)));
        if (edge > 1e-8) {
            s.warnings.push_back("orbital " + std::to_string(n + 1) + " does not vanish at the walls");
        }
        for (std::size_t j = 0; j < interior.size(); ++j) interior[j] = orbitals(n, j + 1);
        dst.forward(interior, coeffs);
        auto row = s.lambda.row(n);
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = coeffs[k];
    }
    detail::fill_defects(s, eps_trunc);
    return s;
}

}  // namespace fcarpet
