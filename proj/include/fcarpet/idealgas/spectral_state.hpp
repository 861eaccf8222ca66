#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/core/occupancy.hpp"
#include "fcarpet/core/units.hpp"

namespace fcarpet {

/// Overlaps lambda(n, k) of initial orbitals with the release-box modes.
///
/// Row i is orbital n = i + 1, column j is mode k = j + 1. Together with the
/// occupancy this is the complete state of the noninteracting gas.
struct SpectralState {
    Matrix<double> lambda;
    Occupancy occupancy;
    /// Per-orbital completeness defect 1 - sum_k lambda(n,k)^2.
    std::vector<double> defect;
    std::vector<std::string> warnings;

    [[nodiscard]] int orbitals() const noexcept { return static_cast<int>(lambda.rows()); }
    [[nodiscard]] int k_max() const noexcept { return static_cast<int>(lambda.cols()); }
    [[nodiscard]] double weight(int row) const { return occupancy.weight(row + 1); }

    /// Atom number carried by the stored orbitals.
    [[nodiscard]] double atom_number() const {
        std::vector<double> w(static_cast<std::size_t>(orbitals()));
        for (int i = 0; i < orbitals(); ++i) w[static_cast<std::size_t>(i)] = weight(i);
        return pairwise_sum(w);
    }

    [[nodiscard]] double max_defect() const {
        double m = 0.0;
        for (double d : defect) m = std::max(m, std::abs(d));
        return m;
    }

    /// Weighted truncation defect, i.e. the atom number missing from the
    /// truncated expansion divided by N.
    [[nodiscard]] double mass_defect() const {
        double missing = 0.0;
        for (int i = 0; i < orbitals(); ++i) missing += weight(i) * defect[static_cast<std::size_t>(i)];
        const double n = atom_number();
        return n > 0 ? missing / n : 0.0;
    }
};

/// Default truncation order: max(40 N_orb, 1000 / D).
inline int default_k_max(double D, int n_orbitals) {
    return std::max(40 * n_orbitals, static_cast<int>(std::ceil(1000.0 / D)));
}

namespace detail {

/// frac(k^2 tau) with the product rounding error folded back in, so that
/// exact revival fractions (tau = 1, 1/2, ...) give exact phases.
inline double revival_fraction(double k2, double tau) {
    const double p = k2 * tau;
    const double err = std::fma(k2, tau, -p);
    double f = (p - std::floor(p)) + err;
    return f - std::floor(f);
}

/// exp(-i E_k t) for k = 1..k_max, evaluated as exp(-2 pi i frac(k^2 t / T_rev)).
inline std::vector<std::complex<double>> mode_phases(int k_max, double t) {
    const double tau = t / units::revival_time;
    std::vector<std::complex<double>> ph(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        const double kk = static_cast<double>(k) * static_cast<double>(k);
        const double angle = -2.0 * units::pi * revival_fraction(kk, tau);
        ph[static_cast<std::size_t>(k) - 1] = {std::cos(angle), std::sin(angle)};
    }
    return ph;
}

inline void fill_defects(SpectralState& s, double eps_trunc) {
    s.defect.assign(static_cast<std::size_t>(s.orbitals()), 0.0);
    for (int i = 0; i < s.orbitals(); ++i) {
        std::vector<double> sq(s.lambda.cols());
        auto row = s.lambda.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < row.size(); ++k) sq[k] = row[k] * row[k];
        s.defect[static_cast<std::size_t>(i)] = 1.0 - pairwise_sum(sq);
    }
    if (s.max_defect() > eps_trunc) {
        s.warnings.push_back("truncation defect " + std::to_string(s.max_defect()) +
                             " exceeds tolerance " + std::to_string(eps_trunc) +
                             " at K_max=" + std::to_string(s.k_max()));
    }
}

}  // namespace detail

}  // namespace fcarpet
