#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/sine_transform.hpp"
#include "fcarpet/meanfield/state.hpp"

namespace fcarpet {

/// Non-finite amplitudes appeared; carries the last time at which the state was finite.
class PropagationDiverged : public NumericError {
public:
    explicit PropagationDiverged(double last_stable_time)
        : NumericError("propagation diverged after t = " + std::to_string(last_stable_time)),
          last_stable_time_(last_stable_time) {}
    [[nodiscard]] double last_stable_time() const noexcept { return last_stable_time_; }

private:
    double last_stable_time_;
};

/// Largest kinetic eigenvalue resolved by the grid, E_{n_points - 1}.
inline double max_resolved_energy(const SpaceGrid& grid) { return box_energy(grid.n_points() - 1); }

/// Strang split-operator propagator for the two-component Hartree-Fock
/// equations i d/dt phi_+ = (-1/2 d^2 + g n_-) phi_+ (and + <-> -).
///
/// The kinetic factor is applied exactly in the hard-wall sine basis; the
/// mean-field kicks are pure phases, so every step is unitary per orbital
/// and the scheme is symmetric in time.
class Propagator {
public:
    Propagator(const SpaceGrid& grid, double dt)
        : grid_(grid), dt_(dt) {
        if (!(dt != 0.0 && std::isfinite(dt))) throw DomainError("Propagator: dt must be finite and nonzero");
        kinetic_.resize(grid.interior_count());
        for (std::size_t k = 0; k < kinetic_.size(); ++k) {
            // Folds the 1 / (2 (n + 1)) normalization of the unscaled transform pair.
            const double phase = -box_energy(static_cast<int>(k) + 1) * dt;
            const double norm = 0.5 / static_cast<double>(grid.n_points());
            kinetic_[k] = {norm * std::cos(phase), norm * std::sin(phase)};
        }
        if (std::abs(dt) * max_resolved_energy(grid) >= 0.5) {
            warnings_.push_back("dt * E_max = " + std::to_string(std::abs(dt) * max_resolved_energy(grid)) +
                                " >= 0.5; highest modes rotate by more than half a radian per step");
        }
    }

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Advances the state by one step of dt. Throws PropagationDiverged if the
    /// amplitudes become non-finite; with rollback enabled the state is then
    /// restored to its value before the step.
    void step(MeanFieldState& s) {
        if (!(s.grid == grid_)) throw DomainError("Propagator: state grid differs from propagator grid");
        const auto saved_plus = check_ ? s.plus : Matrix<cplx>{};
        const auto saved_minus = check_ ? s.minus : Matrix<cplx>{};
        auto n_plus = component_density(s.plus);
        auto n_minus = component_density(s.minus);
        kick(s.plus, n_minus, s.g);
        kick(s.minus, n_plus, s.g);
        drift(s.plus);
        drift(s.minus);
        n_plus = component_density(s.plus);
        n_minus = component_density(s.minus);
        if (!(all_finite(n_plus) && all_finite(n_minus))) {
            if (check_) {
                s.plus = saved_plus;
                s.minus = saved_minus;
            }
            throw PropagationDiverged(t0_ + static_cast<double>(steps_) * dt_);
        }
        kick(s.plus, n_minus, s.g);
        kick(s.minus, n_plus, s.g);
        ++steps_;
        s.t = t0_ + static_cast<double>(steps_) * dt_;
    }

    /// Sets the time origin used to compute s.t = t0 + steps * dt.
    void reset_clock(double t0) {
        t0_ = t0;
        steps_ = 0;
    }

    /// Keep a copy of the state each step so a diverged step can be undone.
    void set_divergence_rollback(bool on) { check_ = on; }

private:
    void kick(Matrix<cplx>& orbitals, const std::vector<double>& n_other, double g) {
        if (g == 0.0) return;
        const double h = 0.5 * g * dt_;
        phase_.resize(n_other.size());
        for (std::size_t j = 1; j + 1 < n_other.size(); ++j) {
            const double ph = -h * n_other[j];
            phase_[j] = {std::cos(ph), std::sin(ph)};
        }
        for (std::size_t a = 0; a < orbitals.rows(); ++a) {
            auto row = orbitals.row(a);
            for (std::size_t j = 1; j + 1 < row.size(); ++j) {
                const double re = row[j].real(), im = row[j].imag();
                row[j] = {re * phase_[j].real() - im * phase_[j].imag(), re * phase_[j].imag() + im * phase_[j].real()};
            }
        }
    }

    void drift(Matrix<cplx>& orbitals) {
        if (orbitals.rows() == 0) return;
        if (!batch_ || batch_->rows() != orbitals.rows()) {
            batch_ = std::make_unique<BatchSineTransform>(orbitals.rows(), kinetic_.size());
        }
        auto buf = batch_->buffer();
        std::copy(orbitals.data().begin(), orbitals.data().end(), buf.begin());
        batch_->execute();
        const std::size_t width = orbitals.cols();
        for (std::size_t a = 0; a < orbitals.rows(); ++a) {
            cplx* row = buf.data() + a * width + 1;
            for (std::size_t k = 0; k < kinetic_.size(); ++k) {
                const double re = row[k].real(), im = row[k].imag();
                const double cr = kinetic_[k].real(), ci = kinetic_[k].imag();
                row[k] = {re * cr - im * ci, re * ci + im * cr};
            }
        }
        batch_->execute();
        std::copy(buf.begin(), buf.end(), orbitals.data().begin());
    }

    static bool all_finite(const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }

    SpaceGrid grid_;
    double dt_;
    std::unique_ptr<BatchSineTransform> batch_;
    std::vector<cplx> kinetic_;
    std::vector<cplx> phase_;
    std::vector<std::string> warnings_;
    double t0_ = 0.0;
    long long steps_ = 0;
    bool check_ = false;
};

/// One step of dt from `s`, returning the new state.
inline MeanFieldState step(MeanFieldState s, double dt) {
    Propagator p(s.grid, dt);
    p.reset_clock(s.t);
    p.step(s);
    return s;
}

/// Mode amplitudes of one orbital (k = 1..n_points-1).
inline std::vector<cplx> mode_amplitudes(std::span<const cplx> orbital, const SpaceGrid& grid, SineTransform& dst) {
    std::vector<cplx> c(grid.interior_count());
    dst.forward(orbital.subspan(1, c.size()), c);
    return c;
}

/// Per-orbital kinetic energies int |d phi/dx|^2 / 2 dx, evaluated spectrally.
inline std::vector<double> kinetic_energies(const Matrix<cplx>& orbitals, const SpaceGrid& grid, SineTransform& dst) {
    std::vector<double> T(orbitals.rows());
    std::vector<double> terms(grid.interior_count());
    for (std::size_t a = 0; a < orbitals.rows(); ++a) {
        const auto c = mode_amplitudes(orbitals.row(a), grid, dst);
        for (std::size_t k = 0; k < c.size(); ++k) terms[k] = box_energy(static_cast<int>(k) + 1) * std::norm(c[k]);
        T[a] = pairwise_sum(terms);
    }
    return T;
}

inline std::vector<double> kinetic_energies(const Matrix<cplx>& orbitals, const SpaceGrid& grid) {
    SineTransform dst(grid.interior_count());
    return kinetic_energies(orbitals, grid, dst);
}

/// Total atom number int (n_+ + n_-) dx.
inline double total_norm(const MeanFieldState& s) {
    auto n = component_density(s.plus);
    const auto m = component_density(s.minus);
    for (std::size_t j = 0; j < n.size(); ++j) n[j] += m[j];
    return s.grid.integrate(n);
}

/// int n_+ n_- dx.
inline double density_overlap(const MeanFieldState& s) {
    auto n = component_density(s.plus);
    const auto m = component_density(s.minus);
    for (std::size_t j = 0; j < n.size(); ++j) n[j] *= m[j];
    return s.grid.integrate(n);
}

/// Hartree-Fock energy: kinetic energy of all orbitals plus g int n_+ n_- dx.
inline double total_energy(const MeanFieldState& s, SineTransform& dst) {
    const auto tp = kinetic_energies(s.plus, s.grid, dst);
    const auto tm = kinetic_energies(s.minus, s.grid, dst);
    return pairwise_sum(tp) + pairwise_sum(tm) + s.g * density_overlap(s);
}

inline double total_energy(const MeanFieldState& s) {
    SineTransform dst(s.grid.interior_count());
    return total_energy(s, dst);
}

}  // namespace fcarpet
