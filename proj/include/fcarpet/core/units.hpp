#pragma once

#include <numbers>

// Natural units throughout: hbar = m = 1 and the release box has length L = 1.
// Energies are in hbar^2/(m L^2), times in m L^2/hbar, couplings in hbar^2/(m L).
namespace fcarpet::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double box_length = 1.0;

/// Characteristic velocity of the box, pi hbar / (2 m L).
inline constexpr double v0 = pi / 2.0;

/// Full revival time 2L/v0 = 4 m L^2 / (pi hbar).
inline constexpr double revival_time = 2.0 * box_length / v0;

}  // namespace fcarpet::units
