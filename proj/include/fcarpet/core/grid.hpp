#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/units.hpp"

namespace fcarpet {

/// Pairwise (cascade) summation. Keeps rounding growth at O(log n) so
/// reductions reproduce closely regardless of how work is split up.
inline double pairwise_sum(std::span<const double> v) {
    constexpr std::size_t block = 32;
    if (v.size() <= block) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Uniform node-based grid on [0, L] including both walls.
///
/// There are n_points intervals and n_points + 1 nodes x_j = j * dx. Hard-wall
/// modes vanish on the first and last node, so integrals use the trapezoidal
/// rule with half weights at the walls.
class SpaceGrid {
public:
    static constexpr int min_points = 16;

    explicit SpaceGrid(int n_points = 400) : n_points_(n_points) {
        if (n_points < min_points) {
            throw DomainError("SpaceGrid: n_points must be >= 16, got " +
                              std::to_string(n_points));
        }
    }

    [[nodiscard]] int n_points() const noexcept { return n_points_; }
    [[nodiscard]] std::size_t node_count() const noexcept {
        return static_cast<std::size_t>(n_points_) + 1;
    }
    [[nodiscard]] std::size_t interior_count() const noexcept {
        return static_cast<std::size_t>(n_points_) - 1;
    }
    [[nodiscard]] double dx() const noexcept { return units::box_length / n_points_; }
    [[nodiscard]] double x(std::size_t j) const noexcept {
        return units::box_length * static_cast<double>(j) / n_points_;
    }

    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> xs(node_count());
        for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = x(j);
        return xs;
    }

    [[nodiscard]] double weight(std::size_t j) const noexcept {
        return (j == 0 || j == node_count() - 1) ? 0.5 * dx() : dx();
    }

    /// Trapezoidal integral of samples on all nodes.
    [[nodiscard]] double integrate(std::span<const double> f) const {
        if (f.size() != node_count()) {
            throw DomainError("SpaceGrid::integrate: expected " +
                              std::to_string(node_count()) + " samples");
        }
        std::vector<double> w(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) w[j] = weight(j) * f[j];
        return pairwise_sum(w);
    }

    bool operator==(const SpaceGrid&) const = default;

private:
    int n_points_;
};

/// Energy of the k-th hard-wall mode of the unit box, k^2 pi^2 / 2.
inline double box_energy(int k) {
    return 0.5 * units::pi * units::pi * static_cast<double>(k) * static_cast<double>(k);
}

/// sqrt(2/L) sin(k pi x / L); exactly zero on the walls.
inline double box_mode_value(int k, double x) {
    if (k <= 0) throw DomainError("box_mode_value: k must be positive");
    if (!(x >= 0.0 && x <= units::box_length)) {
        throw DomainError("box_mode_value: x outside [0, L]");
    }
    if (x == 0.0 || x == units::box_length) return 0.0;
    return std::sqrt(2.0 / units::box_length) * std::sin(k * units::pi * x / units::box_length);
}

/// Unnormalized cardinal sine sin(x)/x with sinc(0) = 1.
inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

}  // namespace fcarpet
