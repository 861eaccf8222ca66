#pragma once

#include <cmath>
#include <cstddef>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/core/units.hpp"

namespace fcarpet {

/// Lowest `count` eigenfunctions of the oscillator omega^2 (x - center)^2 / 2,
/// sampled on every node of `grid` by the stable three-term recurrence. The
/// box walls are ignored, so the cloud must fit well inside [0, L].
inline Matrix<double> hermite_orbitals(int count, double omega, double center, const SpaceGrid& grid) {
    if (count < 1) throw DomainError("hermite_orbitals: count must be >= 1");
    if (!(omega > 0)) throw DomainError("hermite_orbitals: omega must be > 0");
    Matrix<double> m(static_cast<std::size_t>(count), grid.node_count());
    for (std::size_t j = 0; j < grid.node_count(); ++j) {
        const double xi = std::sqrt(omega) * (grid.x(j) - center);
        double h0 = std::pow(omega / units::pi, 0.25) * std::exp(-0.5 * xi * xi);
        double h1 = std::sqrt(2.0) * xi * h0;
        m(0, j) = h0;
        if (count > 1) m(1, j) = h1;
        for (int n = 2; n < count; ++n) {
            const double h2 = std::sqrt(2.0 / n) * xi * h1 - std::sqrt((n - 1.0) / n) * h0;
            h0 = h1;
            h1 = h2;
            m(static_cast<std::size_t>(n), j) = h2;
        }
    }
    return m;
}

}  // namespace fcarpet
