#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/trap.hpp"
#include "fcarpet/core/units.hpp"

namespace fcarpet {

/// Occupation of longitudinal quantum numbers n_x = 1, 2, ...
///
/// weights[i] is the (possibly fractional) number of atoms in states with
/// n_x = i + 1, i.e. multiplicity times thermal factor. T is in units of T_F.
struct Occupancy {
    std::vector<double> weights;
    double N = 0.0;
    double T = 0.0;
    double mu = 0.0;

    [[nodiscard]] double weight(int n) const {
        if (n < 1 || static_cast<std::size_t>(n) > weights.size()) return 0.0;
        return weights[static_cast<std::size_t>(n) - 1];
    }
    /// Largest n_x with a nonzero weight.
    [[nodiscard]] int n_max() const {
        for (std::size_t i = weights.size(); i > 0; --i) {
            if (weights[i - 1] != 0.0) return static_cast<int>(i);
        }
        return 0;
    }
    [[nodiscard]] double total() const { return pairwise_sum(weights); }

    /// Drop trailing weights below `cutoff` (relative to N) and renormalize
    /// the remainder back to N.
    void trim(double cutoff) {
        while (!weights.empty() && weights.back() < cutoff * N) weights.pop_back();
        const double s = total();
        if (s > 0.0) {
            for (double& w : weights) w *= N / s;
        }
    }
};

/// One (possibly degenerate) single-particle level of a separable trap.
struct Level {
    int n_x = 1;
    double energy = 0.0;
    double multiplicity = 1.0;
};

struct PerpLevel {
    double energy = 0.0;
    long multiplicity = 1;
};

inline Occupancy fermi_sea_1d(int N) {
    if (N < 1) throw DomainError("fermi_sea_1d: N must be >= 1");
    Occupancy occ;
    occ.weights.assign(static_cast<std::size_t>(N), 1.0);
    occ.N = N;
    occ.mu = box_energy(N);
    return occ;
}

/// Hard-wall levels of a sub-box of length D, n = 1..n_max.
inline std::vector<Level> box_levels_1d(double D, int n_max) {
    if (!(D > 0)) throw DomainError("box_levels_1d: D must be > 0");
    std::vector<Level> levels;
    levels.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        levels.push_back({n, box_energy(n) / (D * D), 1.0});
    }
    return levels;
}

namespace detail {

inline bool same_energy(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline double box_level(int n, double len) { return box_energy(n) / (len * len); }

}  // namespace detail

/// Degenerate-grouped perpendicular spectrum with energies <= e_max.
inline std::vector<PerpLevel> perpendicular_levels(const PerpTrap& perp, double e_max,
                                                   std::size_t state_cap = 50'000'000) {
    validate(perp);
    std::vector<double> energies;
    auto push = [&](double e) {
        if (energies.size() >= state_cap) {
            throw ResourceError("perpendicular_levels: more than " + std::to_string(state_cap) +
                                " states below e_max=" + std::to_string(e_max));
        }
        energies.push_back(e);
    };
    std::visit(overloaded{
                   [&](const BoxBox& b) {
                       for (int ny = 1; detail::box_level(ny, b.Dy) + detail::box_level(1, b.Dz) <= e_max; ++ny) {
                           const double ey = detail::box_level(ny, b.Dy);
                           for (int nz = 1; ey + detail::box_level(nz, b.Dz) <= e_max; ++nz) {
                               push(ey + detail::box_level(nz, b.Dz));
                           }
                       }
                   },
                   [&](const HarmBox& h) {
                       for (int ny = 0; h.omega_y * (ny + 0.5) + detail::box_level(1, h.Dz) <= e_max; ++ny) {
                           const double ey = h.omega_y * (ny + 0.5);
                           for (int nz = 1; ey + detail::box_level(nz, h.Dz) <= e_max; ++nz) {
                               push(ey + detail::box_level(nz, h.Dz));
                           }
                       }
                   },
                   [&](const HarmHarm& h) {
                       for (int ny = 0; h.omega_y * (ny + 0.5) + 0.5 * h.omega_z <= e_max; ++ny) {
                           const double ey = h.omega_y * (ny + 0.5);
                           for (int nz = 0; ey + h.omega_z * (nz + 0.5) <= e_max; ++nz) {
                               push(ey + h.omega_z * (nz + 0.5));
                           }
                       }
                   },
               },
               perp);
    std::sort(energies.begin(), energies.end());
    std::vector<PerpLevel> levels;
    for (double e : energies) {
        if (!levels.empty() && detail::same_energy(levels.back().energy, e)) {
            ++levels.back().multiplicity;
        } else {
            levels.push_back({e, 1});
        }
    }
    return levels;
}

/// Lowest perpendicular energy (zero point for oscillators).
inline double perpendicular_ground_energy(const PerpTrap& perp) {
    return std::visit(overloaded{
                          [](const BoxBox& b) {
                              return detail::box_level(1, b.Dy) + detail::box_level(1, b.Dz);
                          },
                          [](const HarmBox& h) { return 0.5 * h.omega_y + detail::box_level(1, h.Dz); },
                          [](const HarmHarm& h) { return 0.5 * (h.omega_y + h.omega_z); },
                      },
                      perp);
}

/// All levels (n_x, perpendicular level) of a SubBox3D trap with energy <= e_max.
inline std::vector<Level> spectrum_3d(const SubBox3D& trap, double e_max,
                                      std::size_t state_cap = 50'000'000) {
    const auto perp = perpendicular_levels(trap.perp, e_max, state_cap);
    std::vector<Level> levels;
    for (int nx = 1;; ++nx) {
        const double ex = detail::box_level(nx, trap.D);
        if (perp.empty() || ex + perp.front().energy > e_max) break;
        for (const auto& p : perp) {
            if (ex + p.energy > e_max) break;
            levels.push_back({nx, ex + p.energy, static_cast<double>(p.multiplicity)});
        }
        if (levels.size() > state_cap) {
            throw ResourceError("spectrum_3d: level count exceeds cap");
        }
    }
    return levels;
}

namespace detail {

/// Fill N states from `levels` in order of energy; ties at the Fermi energy go
/// to the lowest n_x first. Returns per-n_x weights and the Fermi energy.
inline Occupancy fill_zero_temperature(std::vector<Level> levels, double N) {
    if (N < 1) throw DomainError("Fermi sea: N must be >= 1");
    std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
        return a.energy < b.energy || (a.energy == b.energy && a.n_x < b.n_x);
    });
    double count = 0.0;
    std::size_t i_fermi = levels.size();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        count += levels[i].multiplicity;
        if (count >= N) {
            i_fermi = i;
            break;
        }
    }
    if (i_fermi == levels.size()) {
        throw DomainError("Fermi sea: spectrum holds fewer than N states");
    }
    const double e_fermi = levels[i_fermi].energy;

    Occupancy occ;
    occ.N = N;
    occ.mu = e_fermi;
    int nx_max = 0;
    for (const auto& l : levels) nx_max = std::max(nx_max, l.n_x);
    occ.weights.assign(static_cast<std::size_t>(nx_max), 0.0);

    double filled = 0.0;
    std::vector<const Level*> ties;
    for (const auto& l : levels) {
        if (same_energy(l.energy, e_fermi)) {
            ties.push_back(&l);
        } else if (l.energy < e_fermi) {
            occ.weights[static_cast<std::size_t>(l.n_x) - 1] += l.multiplicity;
            filled += l.multiplicity;
        }
    }
    std::sort(ties.begin(), ties.end(), [](const Level* a, const Level* b) { return a->n_x < b->n_x; });
    for (const Level* l : ties) {
        const double take = std::min(l->multiplicity, N - filled);
        if (take <= 0) break;
        occ.weights[static_cast<std::size_t>(l->n_x) - 1] += take;
        filled += take;
    }
    while (!occ.weights.empty() && occ.weights.back() == 0.0) occ.weights.pop_back();
    return occ;
}

}  // namespace detail

/// Zero-temperature Fermi energy for N atoms on the given spectrum.
inline double fermi_energy(std::span<const Level> levels, double N) {
    return detail::fill_zero_temperature({levels.begin(), levels.end()}, N).mu;
}

/// Ground-state filling of a SubBox3D trap, returned as multiplicities per n_x.
inline Occupancy fermi_sea_3d(const SubBox3D& trap, int N, std::size_t state_cap = 50'000'000) {
    if (N < 1) throw DomainError("fermi_sea_3d: N must be >= 1");
    validate(TrapSpec{trap});
    const double e0 = detail::box_level(1, trap.D) + perpendicular_ground_energy(trap.perp);
    double e_max = 2.0 * e0;
    for (;;) {
        auto levels = spectrum_3d(trap, e_max, state_cap);
        double count = 0.0;
        for (const auto& l : levels) count += l.multiplicity;
        if (count >= N) {
            // Re-enumerate just above E_F so that every degenerate partner is present.
            const double e_fermi = detail::fill_zero_temperature(std::move(levels), N).mu;
            return detail::fill_zero_temperature(spectrum_3d(trap, e_fermi * (1.0 + 1e-9), state_cap), N);
        }
        e_max *= 1.5;
    }
}

/// Fermi-Dirac filling of a spectrum at temperature T (units of T_F).
///
/// k_B T_F is E_F - energy_reference, with E_F the zero-temperature Fermi
/// energy of the same spectrum and N. The chemical potential is found by
/// bisection so that the occupancies sum to N within 1e-12 relative.
inline Occupancy fermi_dirac_occupancy(std::span<const Level> levels, double N, double T,
                                       double energy_reference = 0.0) {
    if (!(T >= 0)) throw DomainError("fermi_dirac_occupancy: T must be >= 0");
    if (N < 1) throw DomainError("fermi_dirac_occupancy: N must be >= 1");
    Occupancy zero = detail::fill_zero_temperature({levels.begin(), levels.end()}, N);
    if (T == 0.0) return zero;

    double capacity = 0.0;
    double e_min = levels.front().energy;
    int nx_max = 0;
    for (const auto& l : levels) {
        capacity += l.multiplicity;
        e_min = std::min(e_min, l.energy);
        nx_max = std::max(nx_max, l.n_x);
    }
    if (capacity <= N) throw DomainError("fermi_dirac_occupancy: spectrum holds <= N states");

    const double kT = T * (zero.mu - energy_reference);
    if (!(kT > 0)) throw DomainError("fermi_dirac_occupancy: nonpositive Fermi temperature");

    std::vector<double> terms(levels.size());
    auto excess = [&](double mu) {
        for (std::size_t i = 0; i < levels.size(); ++i) {
            const double arg = (levels[i].energy - mu) / kT;
            terms[i] = arg > 700.0 ? 0.0 : levels[i].multiplicity / (1.0 + std::exp(arg));
        }
        return pairwise_sum(terms) - N;
    };

    double lo = e_min - kT;
    for (double step = kT; excess(lo) > 0.0; step *= 2.0) lo -= step;
    double hi = zero.mu + kT;
    for (double step = kT; excess(hi) < 0.0; step *= 2.0) hi += step;

    double mu = 0.5 * (lo + hi);
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        mu = 0.5 * (lo + hi);
        const double f = excess(mu);
        if (std::abs(f) <= 1e-12 * N) {
            converged = true;
            break;
        }
        (f > 0.0 ? hi : lo) = mu;
    }
    if (!converged) {
        throw NumericError("fermi_dirac_occupancy: bisection did not converge in 200 steps");
    }

    Occupancy occ;
    occ.N = N;
    occ.T = T;
    occ.mu = mu;
    occ.weights.assign(static_cast<std::size_t>(nx_max), 0.0);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        occ.weights[static_cast<std::size_t>(levels[i].n_x) - 1] += terms[i];
    }
    return occ;
}

/// 1D sub-box spectrum long enough for Fermi-Dirac filling at temperature T.
inline std::vector<Level> box_levels_for_temperature(double D, int N, double T) {
    const double e_fermi = box_energy(N) / (D * D);
    const double e_top = e_fermi * (1.0 + 40.0 * T);
    const int n_max = static_cast<int>(std::ceil(D / units::pi * std::sqrt(2.0 * e_top))) + 2;
    return box_levels_1d(D, std::max(n_max, N + 2));
}

/// SubBox3D spectrum long enough for Fermi-Dirac filling at temperature T.
/// The Fermi temperature is measured from the perpendicular zero point.
inline std::vector<Level> spectrum_3d_for_temperature(const SubBox3D& trap, int N, double T,
                                                      std::size_t state_cap = 50'000'000) {
    const Occupancy zero = fermi_sea_3d(trap, N, state_cap);
    const double ref = perpendicular_ground_energy(trap.perp);
    const double e_top = zero.mu + 40.0 * T * (zero.mu - ref);
    return spectrum_3d(trap, e_top * (1.0 + 1e-12), state_cap);
}

}  // namespace fcarpet
