#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/units.hpp"

namespace fcarpet {

/// Hard-wall box [0, D] sharing its left wall with the release box.
struct SubBox {
    double D = 0.5;
};

/// Harmonic potential omega^2 (x - center)^2 / 2 inside the release box walls.
/// center = 0 gives the half oscillator that shares the left wall.
struct Harmonic {
    double omega = 1.0;
    double center = 0.5 * units::box_length;
};

struct BoxBox {
    double Dy = 1.0;
    double Dz = 1.0;
};
struct HarmBox {
    double omega_y = 1.0;
    double Dz = 1.0;
};
struct HarmHarm {
    double omega_y = 1.0;
    double omega_z = 1.0;
};
using PerpTrap = std::variant<BoxBox, HarmBox, HarmHarm>;

/// Sub-box along x combined with a perpendicular confinement.
struct SubBox3D {
    double D = 0.5;
    PerpTrap perp = HarmHarm{};
};

using TrapSpec = std::variant<SubBox, Harmonic, SubBox3D>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void validate(const PerpTrap& perp) {
    std::visit(overloaded{
                   [](const BoxBox& b) {
                       if (!(b.Dy > 0 && b.Dz > 0)) throw DomainError("BoxBox: lengths must be > 0");
                   },
                   [](const HarmBox& h) {
                       if (!(h.omega_y > 0 && h.Dz > 0))
                           throw DomainError("HarmBox: omega_y and Dz must be > 0");
                   },
                   [](const HarmHarm& h) {
                       if (!(h.omega_y > 0 && h.omega_z > 0))
                           throw DomainError("HarmHarm: frequencies must be > 0");
                   },
               },
               perp);
}

inline void validate(const TrapSpec& trap) {
    std::visit(overloaded{
                   [](const SubBox& s) {
                       if (!(s.D > 0 && s.D <= units::box_length))
                           throw DomainError("SubBox: require 0 < D <= L");
                   },
                   [](const Harmonic& h) {
                       if (!(h.omega > 0)) throw DomainError("Harmonic: omega must be > 0");
                       if (!(h.center >= 0 && h.center <= units::box_length))
                           throw DomainError("Harmonic: center outside [0, L]");
                   },
                   [](const SubBox3D& s) {
                       if (!(s.D > 0 && s.D <= units::box_length))
                           throw DomainError("SubBox3D: require 0 < D <= L");
                       validate(s.perp);
                   },
               },
               trap);
}

/// True when the classical turning points of a particle at the Thomas-Fermi
/// chemical potential for N atoms lie within [0, L].
inline bool cloud_fits(const TrapSpec& trap, int N) {
    validate(trap);
    return std::visit(overloaded{
                          [](const SubBox&) { return true; },
                          [](const SubBox3D&) { return true; },
                          [N](const Harmonic& h) {
                              // Full oscillator: mu = N omega, radius sqrt(2N/omega).
                              // Half oscillator (center on a wall): odd states only, mu = 2N omega.
                              const bool on_wall = h.center == 0.0 || h.center == units::box_length;
                              const double mu = (on_wall ? 2.0 : 1.0) * N * h.omega;
                              const double r = std::sqrt(2.0 * mu) / h.omega;
                              if (on_wall) return r <= units::box_length;
                              return h.center - r >= 0.0 && h.center + r <= units::box_length;
                          },
                      },
                      trap);
}

inline std::string describe(const PerpTrap& perp) {
    return std::visit(overloaded{
                          [](const BoxBox& b) {
                              return "BoxBox(Dy=" + std::to_string(b.Dy) +
                                     ",Dz=" + std::to_string(b.Dz) + ")";
                          },
                          [](const HarmBox& h) {
                              return "HarmBox(omega_y=" + std::to_string(h.omega_y) +
                                     ",Dz=" + std::to_string(h.Dz) + ")";
                          },
                          [](const HarmHarm& h) {
                              return "HarmHarm(omega_y=" + std::to_string(h.omega_y) +
                                     ",omega_z=" + std::to_string(h.omega_z) + ")";
                          },
                      },
                      perp);
}

inline std::string describe(const TrapSpec& trap) {
    return std::visit(overloaded{
                          [](const SubBox& s) { return "SubBox(D=" + std::to_string(s.D) + ")"; },
                          [](const Harmonic& h) {
                              return "Harmonic(omega=" + std::to_string(h.omega) +
                                     ",center=" + std::to_string(h.center) + ")";
                          },
                          [](const SubBox3D& s) {
                              return "SubBox3D(D=" + std::to_string(s.D) + "," + describe(s.perp) + ")";
                          },
                      },
                      trap);
}

}  // namespace fcarpet
