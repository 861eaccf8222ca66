#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "fcarpet/coherence/g1.hpp"
#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/units.hpp"
#include "fcarpet/meanfield/run.hpp"

namespace fcarpet {

struct CoherenceTrace {
    std::vector<double> times;
    std::vector<double> G;
    std::vector<double> u0;
    std::vector<char> flagged;
    double G_inf = std::numeric_limits<double>::quiet_NaN();
    double t_dec = std::numeric_limits<double>::quiet_NaN();

    void push(double t, const CoherenceValue& v) {
        times.push_back(t);
        G.push_back(v.G);
        u0.push_back(vertex_path(t));
        flagged.push_back(v.flagged ? 1 : 0);
    }
};

/// RunObserver that appends G(t) of one component to `trace`.
inline RunObserver coherence_observer(CoherenceTrace& trace, Component c = Component::plus, int search = 3) {
    return [&trace, c, search](const MeanFieldState& s) {
        trace.push(s.t, coherence_measure(g1_map(s, c), s.t, search));
    };
}

/// True when the rectangle path degenerates onto a diagonal of the box,
/// i.e. t lies within `halfwidth` of a time where the vertex touches a wall.
inline bool near_path_degeneracy(double t, double halfwidth) {
    const double period = 0.25 * units::revival_time;
    const double r = std::fmod(t, period);
    return r < halfwidth || period - r < halfwidth;
}

struct DecoherenceOptions {
    double G0 = 2.0 / units::pi;
    double drop_fraction = 0.9;
    double hold = 0.02 * units::revival_time;
    double tail_fraction = 0.2;
    double max_tail_change = 0.15;  // fitted change across the tail, relative to its mean
    double min_drop = 0.1;          // relative drop of G_inf below G0 that counts as decay
    double spike_halfwidth = 0.01 * units::revival_time;
    double revival_halfwidth = 0.03 * units::revival_time;  // partial recoherence around multiples of T_rev/2
};

/// True when t lies within `halfwidth` of a multiple of T_rev/2.
inline bool near_mirror_revival(double t, double halfwidth) {
    const double period = 0.5 * units::revival_time;
    const double r = std::fmod(t, period);
    return r < halfwidth || period - r < halfwidth;
}

/// Raised when the tail of a trace has not settled on a plateau.
class NotEquilibrated : public NumericError {
public:
    NotEquilibrated(const std::string& what, std::shared_ptr<const CoherenceTrace> partial)
        : NumericError(what), partial_(std::move(partial)) {}
    [[nodiscard]] const CoherenceTrace& partial() const noexcept { return *partial_; }

private:
    std::shared_ptr<const CoherenceTrace> partial_;
};

namespace detail {

inline double tail_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const double n = static_cast<double>(t.size());
    double mt = 0, my = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= n;
    my /= n;
    double sty = 0, stt = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sty += (t[i] - mt) * (y[i] - my);
        stt += (t[i] - mt) * (t[i] - mt);
    }
    return stt > 0 ? sty / stt : 0.0;
}

}  // namespace detail

/// Plateau G_inf = mean of the final tail_fraction of samples; t_dec is the
/// earliest sample with G <= G0 - drop_fraction (G0 - G_inf) whose mean over
/// the following `hold` also stays below that level. Samples near path
/// degeneracies and mirror revivals are ignored. Returns +inf when G_inf lies
/// within min_drop of G0, and stores G_inf and t_dec in the trace.
inline double decoherence_time(CoherenceTrace& trace, const DecoherenceOptions& opt = {}) {
    if (trace.times.size() != trace.G.size() || trace.times.size() < 10) {
        throw ValidationError("decoherence_time: need at least 10 samples");
    }
    std::vector<double> tt, gg;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        if (near_path_degeneracy(trace.times[i], opt.spike_halfwidth)) continue;
        if (trace.times[i] > opt.revival_halfwidth && near_mirror_revival(trace.times[i], opt.revival_halfwidth)) continue;
        tt.push_back(trace.times[i]);
        gg.push_back(trace.G[i]);
    }
    if (tt.size() < 10) throw ValidationError("decoherence_time: fewer than 10 samples away from spikes");
    const auto tail = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(opt.tail_fraction * tt.size())));
    const std::vector<double> t_tail(tt.end() - static_cast<long>(tail), tt.end());
    const std::vector<double> g_tail(gg.end() - static_cast<long>(tail), gg.end());
    double mean = 0;
    for (double v : g_tail) mean += v;
    mean /= static_cast<double>(g_tail.size());
    const double slope = detail::tail_slope(t_tail, g_tail);
    const double change = std::abs(slope) * (t_tail.back() - t_tail.front());
    if (change > opt.max_tail_change * std::abs(mean)) {
        throw NotEquilibrated("decoherence_time: no plateau in the final samples (G changes by " +
                                  std::to_string(change) + " across the tail, mean " + std::to_string(mean) + ")",
                              std::make_shared<const CoherenceTrace>(trace));
    }
    trace.G_inf = mean;
    if (opt.G0 - mean < opt.min_drop * opt.G0) {
        trace.t_dec = std::numeric_limits<double>::infinity();
        return trace.t_dec;
    }
    const double level = opt.G0 - opt.drop_fraction * (opt.G0 - mean);
    for (std::size_t i = 0; i < tt.size(); ++i) {
        if (gg[i] > level) continue;
        double sum = 0;
        std::size_t count = 0, k = i;
        for (; k < tt.size() && tt[k] - tt[i] <= opt.hold; ++k) {
            sum += gg[k];
            ++count;
        }
        if (tt[k - 1] - tt[i] < 0.5 * opt.hold) break;
        if (sum / static_cast<double>(count) <= level) {
            trace.t_dec = tt[i];
            return trace.t_dec;
        }
    }
    throw NotEquilibrated("decoherence_time: G never stays below the threshold over the hold window",
                          std::make_shared<const CoherenceTrace>(trace));
}

}  // namespace fcarpet
