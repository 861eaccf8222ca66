#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/idealgas/evolution.hpp"
#include "fcarpet/meanfield/propagator.hpp"
#include "fcarpet/meanfield/state.hpp"

namespace fcarpet {

struct ConservationLog {
    std::vector<double> times;
    std::vector<double> norm;
    std::vector<double> energy;

    [[nodiscard]] double norm_drift() const { return relative_drift(norm); }
    [[nodiscard]] double energy_drift() const { return relative_drift(energy); }

private:
    static double relative_drift(const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x - v.front()));
        return m / std::abs(v.front());
    }
};

/// Per-orbital kinetic energies T_n(t_i) of one component.
struct KineticSeries {
    std::string component;
    std::vector<double> times;
    Matrix<double> T;  // rows: times, cols: orbitals
};

struct RunResult {
    Carpet plus;
    Carpet minus;
    ConservationLog log;
    KineticSeries kinetic_plus;
    KineticSeries kinetic_minus;
    std::vector<std::string> warnings;
};

/// Thrown by run() when propagation diverges; holds everything sampled so far.
class RunDiverged : public PropagationDiverged {
public:
    RunDiverged(double last_stable_time, std::shared_ptr<const RunResult> partial)
        : PropagationDiverged(last_stable_time), partial_(std::move(partial)) {}
    [[nodiscard]] const RunResult& partial() const noexcept { return *partial_; }

private:
    std::shared_ptr<const RunResult> partial_;
};

/// Called at every sample (including t = t_start) with the current state.
using RunObserver = std::function<void(const MeanFieldState&)>;

struct RunOptions {
    double t_end = 0.0;
    double dt = 1e-7;
    long sample_every = 100;  // steps between samples
    double horizon = units::revival_time;
    RunObserver observer;
};

namespace detail {

inline Carpet empty_carpet(const MeanFieldState& s, const std::string& tag) {
    Carpet c;
    c.grid = s.grid;
    c.N = s.per_component();
    c.trap = tag;
    c.k_max = s.grid.n_points() - 1;
    c.density = Matrix<double>(0, s.grid.node_count());
    return c;
}

}  // namespace detail

/// Propagates `state` to t_end in steps of dt, sampling densities, norm,
/// energy and per-orbital kinetic energies every `sample_every` steps.
inline RunResult run(MeanFieldState& state, const RunOptions& opt) {
    if (!(opt.dt > 0)) throw DomainError("run: dt must be > 0");
    if (!(opt.t_end >= state.t)) throw DomainError("run: t_end must be >= current time");
    if (opt.t_end > opt.horizon * (1 + 1e-12)) throw DomainError("run: t_end exceeds the configured horizon");
    if (opt.sample_every < 1) throw DomainError("run: sample_every must be >= 1");
    const double span = opt.t_end - state.t;
    const auto steps = static_cast<long>(std::llround(span / opt.dt));
    if (std::abs(static_cast<double>(steps) * opt.dt - span) > 1e-9 * std::max(span, opt.dt)) {
        throw ValidationError("run: (t_end - t) must be a whole number of steps dt");
    }
    if (steps % opt.sample_every != 0) {
        throw ValidationError("run: sample_every must divide the step count " + std::to_string(steps));
    }

    RunResult r;
    r.plus = detail::empty_carpet(state, "plus");
    r.minus = detail::empty_carpet(state, "minus");
    r.kinetic_plus.component = "plus";
    r.kinetic_minus.component = "minus";
    r.kinetic_plus.T = Matrix<double>(0, static_cast<std::size_t>(state.per_component()));
    r.kinetic_minus.T = Matrix<double>(0, static_cast<std::size_t>(state.per_component()));

    Propagator prop(state.grid, opt.dt);
    prop.reset_clock(state.t);
    r.warnings = prop.warnings();
    SineTransform dst(state.grid.interior_count());

    auto sample = [&] {
        const auto np = component_density(state.plus);
        const auto nm = component_density(state.minus);
        r.plus.times.push_back(state.t);
        r.minus.times.push_back(state.t);
        r.plus.density.append_row(np);
        r.minus.density.append_row(nm);
        const auto tp = kinetic_energies(state.plus, state.grid, dst);
        const auto tm = kinetic_energies(state.minus, state.grid, dst);
        r.kinetic_plus.times.push_back(state.t);
        r.kinetic_minus.times.push_back(state.t);
        r.kinetic_plus.T.append_row(tp);
        r.kinetic_minus.T.append_row(tm);
        std::vector<double> sum(np.size()), prod(np.size());
        for (std::size_t j = 0; j < np.size(); ++j) {
            sum[j] = np[j] + nm[j];
            prod[j] = np[j] * nm[j];
        }
        r.log.times.push_back(state.t);
        r.log.norm.push_back(state.grid.integrate(sum));
        r.log.energy.push_back(pairwise_sum(tp) + pairwise_sum(tm) + state.g * state.grid.integrate(prod));
        if (opt.observer) opt.observer(state);
    };

    sample();
    for (long i = 1; i <= steps; ++i) {
        try {
            prop.step(state);
        } catch (const PropagationDiverged& e) {
            throw RunDiverged(e.last_stable_time(), std::make_shared<const RunResult>(std::move(r)));
        }
        if (i % opt.sample_every == 0) sample();
    }
    return r;
}

struct KineticStats {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double time_variance = 0.0;  // per-orbital variance over time, averaged over orbitals
    std::size_t samples = 0;
};

namespace detail {

inline double mean_of(std::span<const double> v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

}  // namespace detail

/// Pools T_n(t) over all orbitals of all series and the sample times in
/// [t_from, t_to]; returns mean, population variance and sample skewness
/// m3 / m2^(3/2).
inline KineticStats kinetic_stats(std::span<const KineticSeries> series, double t_from, double t_to) {
    std::vector<double> pool;
    std::vector<double> per_orbital_var;
    std::size_t time_samples = 0;
    for (const auto& s : series) {
        std::size_t here = 0;
        std::vector<std::vector<double>> cols(s.T.cols());
        for (std::size_t i = 0; i < s.times.size(); ++i) {
            if (s.times[i] < t_from || s.times[i] > t_to) continue;
            ++here;
            const auto row = s.T.row(i);
            for (std::size_t a = 0; a < row.size(); ++a) {
                pool.push_back(row[a]);
                cols[a].push_back(row[a]);
            }
        }
        time_samples = std::max(time_samples, here);
        for (auto& c : cols) {
            if (c.empty()) continue;
            const double m = detail::mean_of(c);
            for (double& v : c) v = (v - m) * (v - m);
            per_orbital_var.push_back(detail::mean_of(c));
        }
    }
    if (time_samples < 10) {
        throw ValidationError("kinetic_stats: window holds " + std::to_string(time_samples) +
                              " samples, need at least 10");
    }
    KineticStats k;
    k.samples = pool.size();
    k.mean = pairwise_sum(pool) / static_cast<double>(pool.size());
    std::vector<double> d2(pool.size()), d3(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double d = pool[i] - k.mean;
        d2[i] = d * d;
        d3[i] = d * d * d;
    }
    k.variance = pairwise_sum(d2) / static_cast<double>(pool.size());
    const double m3 = pairwise_sum(d3) / static_cast<double>(pool.size());
    k.skewness = k.variance > 0 ? m3 / std::pow(k.variance, 1.5) : 0.0;
    k.time_variance = detail::mean_of(per_orbital_var);
    return k;
}

inline KineticStats kinetic_stats(const KineticSeries& series, double t_from, double t_to) {
    return kinetic_stats(std::span<const KineticSeries>(&series, 1), t_from, t_to);
}

}  // namespace fcarpet
