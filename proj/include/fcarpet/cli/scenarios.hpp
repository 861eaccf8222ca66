#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fcarpet/cli/config.hpp"
#include "fcarpet/coherence.hpp"
#include "fcarpet/core.hpp"
#include "fcarpet/idealgas.hpp"
#include "fcarpet/io.hpp"
#include "fcarpet/meanfield.hpp"
#include "fcarpet/structures.hpp"

namespace fcarpet::cli {

namespace fs = std::filesystem;

/// Outcome of one scenario: the one-line summary and every file written.
struct ScenarioResult {
    std::string summary;
    std::vector<fs::path> files;
    std::vector<std::string> warnings;
};

/// Numeric failure after partial artifacts were written.
class ScenarioFailed : public NumericError {
public:
    ScenarioFailed(const std::string& what, ScenarioResult partial)
        : NumericError(what), partial_(std::move(partial)) {}
    [[nodiscard]] const ScenarioResult& partial() const noexcept { return partial_; }

private:
    ScenarioResult partial_;
};

namespace detail {

inline std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

class Writer {
public:
    explicit Writer(const ExperimentConfig& c) : cfg_(c), dir_(c.out_dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ResourceError("cannot create output directory " + dir_.string());
    }

    fs::path path(const std::string& suffix) const { return dir_ / (cfg_.stem() + suffix); }

    void echo(ScenarioResult& r) const {
        const auto p = path(".config.echo");
        const std::string text = to_ini(cfg_);
        io::atomic_write(p, [&](std::ostream& os) { os << text; });
        r.files.push_back(p);
    }
    void carpet(ScenarioResult& r, const Carpet& c, const std::string& tag) const {
        const fs::path stem = path(tag);
        r.files.push_back(io::write_carpet(stem, c));
        r.files.emplace_back(stem.string() + ".carpet.json");
        heatmap(r, c.density, tag);
    }
    void heatmap(ScenarioResult& r, const Matrix<double>& m, const std::string& tag) const {
        if (!cfg_.png || m.rows() == 0) return;
        io::HeatmapOptions opt;
        opt.scale = cfg_.scale == "percentile" ? io::ColorScale::percentile : io::ColorScale::linear;
        opt.clip_percent = cfg_.clip_percent;
        const auto p = path(tag + ".png");
        io::render_heatmap(m, p, opt);
        r.files.push_back(p);
        r.files.emplace_back(p.string() + ".txt");
    }
    void csv(ScenarioResult& r, const io::Table& t, const std::string& tag) const {
        const auto p = path(tag + ".csv");
        io::write_csv(p, t);
        r.files.push_back(p);
    }
    void json(ScenarioResult& r, const nlohmann::json& j, const std::string& tag) const {
        const auto p = path(tag + ".json");
        const std::string text = j.dump(2) + "\n";
        io::atomic_write(p, [&](std::ostream& os) { os << text; });
        r.files.push_back(p);
    }

private:
    const ExperimentConfig& cfg_;
    fs::path dir_;
};

inline SpectralState ideal_state(const ExperimentConfig& c, std::string& trap_desc) {
    if (c.trap == "subbox") {
        trap_desc = describe(TrapSpec{SubBox{c.D}});
        return overlaps_subbox(c.D, c.N, c.k_max > 0 ? c.k_max : default_k_max(c.D, c.N));
    }
    trap_desc = describe(TrapSpec{Harmonic{c.omega, c.center}});
    const int k = c.k_max > 0 ? c.k_max
                              : std::max(200, static_cast<int>(std::ceil(4 * std::sqrt(2.0 * c.N * c.omega) / units::pi)));
    const SpaceGrid fine(std::max(4000, 2 * k));
    return overlaps_numeric(hermite_orbitals(c.N, c.omega, c.center, fine), fine, k);
}

/// Start state for TDHF runs: a checkpoint when resuming, else the separated halves.
inline MeanFieldState tdhf_start(const ExperimentConfig& c) {
    if (!c.resume.empty()) {
        auto s = load_checkpoint(c.resume);
        if (s.grid.n_points() != c.n_points) throw ValidationError("resume: checkpoint grid differs from n_points");
        return s;
    }
    return init_separated(c.N, SpaceGrid(c.n_points), c.g);
}

/// Step count rounded up to whole sample blocks.
inline RunOptions run_options(const ExperimentConfig& c, double t_start) {
    RunOptions o;
    o.dt = c.dt;
    o.sample_every = c.sample_every;
    const double span = std::max(0.0, c.t_end_or_default() * units::revival_time - t_start);
    auto steps = static_cast<long>(std::ceil(span / c.dt - 1e-9));
    steps = (steps + c.sample_every - 1) / c.sample_every * c.sample_every;
    o.t_end = t_start + static_cast<double>(steps) * c.dt;
    o.horizon = std::max(units::revival_time, o.t_end);
    return o;
}

inline io::Table conservation_table(const ConservationLog& log) {
    io::Table t;
    t.add("t", log.times);
    t.add("norm", log.norm);
    t.add("energy", log.energy);
    return t;
}

inline io::Table kinetic_table(const KineticSeries& k) {
    io::Table t;
    t.add("t", k.times);
    for (std::size_t a = 0; a < k.T.cols(); ++a) {
        std::vector<double> col(k.T.rows());
        for (std::size_t i = 0; i < k.T.rows(); ++i) col[i] = k.T(i, a);
        t.add("T_" + std::to_string(a + 1), std::move(col));
    }
    return t;
}

inline io::Table trace_table(const CoherenceTrace& tr) {
    io::Table t;
    t.add("t", tr.times);
    t.add("G", tr.G);
    t.add("u0", tr.u0);
    std::vector<double> fl(tr.flagged.begin(), tr.flagged.end());
    t.add("flagged", std::move(fl));
    return t;
}

inline void write_run(const Writer& w, ScenarioResult& r, const RunResult& run, bool carpets) {
    if (carpets) {
        w.carpet(r, run.plus, ".plus");
        w.carpet(r, run.minus, ".minus");
    }
    w.csv(r, conservation_table(run.log), ".conservation");
    w.csv(r, kinetic_table(run.kinetic_plus), ".kinetic_plus");
    w.csv(r, kinetic_table(run.kinetic_minus), ".kinetic_minus");
}

struct CoherenceOutcome {
    RunResult run;
    CoherenceTrace trace;
    double t_dec = std::numeric_limits<double>::quiet_NaN();
    std::string t_dec_error;
    std::optional<KineticStats> stats;
    MeanFieldState final_state;
};

inline CoherenceOutcome coherence_run(const ExperimentConfig& c, MeanFieldState s) {
    CoherenceOutcome out;
    auto opt = run_options(c, s.t);
    opt.observer = coherence_observer(out.trace, Component::plus, c.search);
    out.run = run(s, opt);
    out.final_state = std::move(s);
    try {
        out.t_dec = decoherence_time(out.trace);
    } catch (const NotEquilibrated& e) {
        out.t_dec_error = e.what();
    }
    if (std::isfinite(out.t_dec)) {
        const KineticSeries both[2] = {out.run.kinetic_plus, out.run.kinetic_minus};
        try {
            out.stats = kinetic_stats(both, out.t_dec, out.run.log.times.back());
        } catch (const ValidationError&) {
        }
    }
    return out;
}

}  // namespace detail

inline ScenarioResult run_ideal_carpet(const ExperimentConfig& c) {
    detail::Writer w(c);
    ScenarioResult r;
    std::string desc;
    const auto s = detail::ideal_state(c, desc);
    const auto times = uniform_times(c.t_end_or_default() * units::revival_time, static_cast<std::size_t>(c.n_times));
    const auto carpet = make_carpet(s, times, SpaceGrid(c.n_points), desc, static_cast<unsigned>(c.threads));
    r.warnings = s.warnings;
    w.carpet(r, carpet, "");
    w.echo(r);
    r.summary = "ideal-carpet: N=" + std::to_string(c.N) + " trap=" + desc + " K_max=" + std::to_string(s.k_max()) +
                " d_1=" + detail::fmt(contribution_depth_direct(s, 1)) + " max_defect=" + detail::fmt(s.max_defect(), 3) +
                " rows=" + std::to_string(carpet.density.rows());
    return r;
}

inline ScenarioResult run_depths(const ExperimentConfig& c) {
    detail::Writer w(c);
    ScenarioResult r;
    const int k = c.k_max > 0 ? c.k_max : default_k_max(c.D, c.N);
    const auto s = overlaps_subbox(c.D, c.N, k);
    const SpaceGrid fine(std::max(c.n_points, 20000));
    const auto n0 = subbox_density(c.D, fermi_sea_1d(c.N), fine);
    io::Table t;
    std::vector<double> ps, dd, ds, df;
    for (int sign : {1, -1}) {
        for (int q = 1; q <= c.p_max; ++q) {
            const auto rep = depth_report(s, c.D, n0, fine, sign * q);
            ps.push_back(sign * q);
            dd.push_back(rep.d_direct);
            ds.push_back(rep.d_sinc);
            df.push_back(rep.d_fourier);
        }
    }
    t.add("p", ps);
    t.add("d_direct", dd);
    t.add("d_sinc", ds);
    t.add("d_fourier", df);
    w.csv(r, t, "");
    w.echo(r);
    r.warnings = s.warnings;
    r.summary = "depths: N=" + std::to_string(c.N) + " D=" + detail::fmt(c.D) + " K_max=" + std::to_string(k) +
                " d_1=" + detail::fmt(dd[0], 8) + " (sinc " + detail::fmt(ds[0], 8) + ", fourier " +
                detail::fmt(df[0], 8) + ")";
    return r;
}

inline ScenarioResult run_widths(const ExperimentConfig& c) {
    detail::Writer w(c);
    ScenarioResult r;
    const auto s = overlaps_subbox(c.D, c.N, c.k_max > 0 ? c.k_max : default_k_max(c.D, c.N));
    const double kF = fermi_wavevector(SubBox{c.D}, c.N);
    const auto times = generic_times(0.02 * units::revival_time, 0.22 * units::revival_time, c.width_samples);
    RefinedTrackOptions opt;
    opt.half_window = 3 * w0 / (2 * kF);
    opt.points = 301;
    const auto tr = track_structure_refined(s, c.p, times, opt);
    io::Table t;
    std::vector<double> ts, xs, ds, ws, found;
    std::vector<double> good;
    for (const auto& smp : tr.samples) {
        ts.push_back(smp.t);
        xs.push_back(smp.x);
        ds.push_back(smp.depth);
        ws.push_back(smp.width);
        found.push_back(smp.found ? 1 : 0);
        if (smp.found && std::isfinite(smp.width)) good.push_back(smp.width);
    }
    t.add("t", ts);
    t.add("x", xs);
    t.add("depth", ds);
    t.add("width", ws);
    t.add("found", found);
    w.csv(r, t, "");
    w.echo(r);
    if (good.empty()) throw ScenarioFailed("widths: structure not found at any sample time", r);
    const double med = median(good);
    r.summary = "widths: N=" + std::to_string(c.N) + " D=" + detail::fmt(c.D) + " p=" + std::to_string(c.p) +
                " median FWHM=" + detail::fmt(med) + " FWHM*2kF=" + detail::fmt(med * 2 * kF) + " (w0=" +
                detail::fmt(w0) + ") eta=" + detail::fmt(w0 / (med * kF), 4);
    return r;
}

inline ScenarioResult run_temperature(const ExperimentConfig& c) {
    detail::Writer w(c);
    ScenarioResult r;
    const auto scan = temperature_width_scan(SubBox{c.D}, c.N, c.temperatures, c.p);
    io::Table t;
    std::vector<double> T, wd, ratio, depth, cens;
    for (const auto& pt : scan) {
        T.push_back(pt.T);
        wd.push_back(pt.width);
        ratio.push_back(pt.ratio);
        depth.push_back(pt.depth);
        cens.push_back(pt.censored ? 1 : 0);
    }
    t.add("T", T);
    t.add("width", wd);
    t.add("ratio", ratio);
    t.add("depth", depth);
    t.add("censored", cens);
    w.csv(r, t, "");
    w.echo(r);
    r.summary = "temperature: N=" + std::to_string(c.N) + " D=" + detail::fmt(c.D) + " T/T_F=" +
                detail::fmt(T.back()) + " width ratio=" + detail::fmt(ratio.back(), 4) + " depth change=" +
                detail::fmt(depth.back() - depth.front(), 3);
    return r;
}

inline ScenarioResult run_tdhf(const ExperimentConfig& c) {
    detail::Writer w(c);
    ScenarioResult r;
    auto s = detail::tdhf_start(c);
    const auto opt = detail::run_options(c, s.t);
    RunResult run;
    try {
        run = fcarpet::run(s, opt);
    } catch (const RunDiverged& e) {
        detail::write_run(w, r, e.partial(), true);
        w.echo(r);
        throw ScenarioFailed(e.what(), r);
    }
    r.warnings = run.warnings;
    detail::write_run(w, r, run, true);
    if (!c.checkpoint.empty()) {
        save_checkpoint(s, c.checkpoint);
        r.files.emplace_back(c.checkpoint);
    }
    w.echo(r);
    r.summary = "tdhf: N=" + std::to_string(s.atom_number()) + " g=" + detail::fmt(s.g) + " t_end=" +
                detail::fmt(s.t / units::revival_time) + " T_rev dN/N=" + detail::fmt(run.log.norm_drift(), 3) +
                " dE/E=" + detail::fmt(run.log.energy_drift(), 3);
    return r;
}

inline ScenarioResult run_coherence(const ExperimentConfig& c) {
    detail::Writer w(c);
    ScenarioResult r;
    detail::CoherenceOutcome out;
    try {
        out = detail::coherence_run(c, detail::tdhf_start(c));
    } catch (const RunDiverged& e) {
        detail::write_run(w, r, e.partial(), true);
        w.echo(r);
        throw ScenarioFailed(e.what(), r);
    }
    r.warnings = out.run.warnings;
    detail::write_run(w, r, out.run, true);
    w.csv(r, detail::trace_table(out.trace), ".coherence");
    const auto g1 = g1_map(out.final_state);
    const auto g1p = w.path(".g1.bin");
    io::write_matrix(g1p, g1.values);
    r.files.push_back(g1p);
    Matrix<double> mod(g1.values.rows(), g1.values.cols());
    for (std::size_t i = 0; i < mod.data().size(); ++i) mod.data()[i] = std::abs(g1.values.data()[i]);
    w.heatmap(r, mod, ".g1");
    if (!c.checkpoint.empty()) {
        save_checkpoint(out.final_state, c.checkpoint);
        r.files.emplace_back(c.checkpoint);
    }
    w.echo(r);
    std::string line = "coherence: N=" + std::to_string(out.final_state.atom_number()) + " g=" +
                       detail::fmt(out.final_state.g) + " G_inf=" + detail::fmt(out.trace.G_inf, 4);
    if (!out.t_dec_error.empty()) {
        r.summary = line + " t_dec unavailable";
        throw ScenarioFailed(out.t_dec_error, r);
    }
    line += " t_dec=" + detail::fmt(out.t_dec / units::revival_time, 4) + " T_rev";
    if (out.stats) {
        line += " mu_T=" + detail::fmt(out.stats->mean) + " var_T=" + detail::fmt(out.stats->variance) +
                " skew=" + detail::fmt(out.stats->skewness, 3);
    }
    r.summary = line + " dN/N=" + detail::fmt(out.run.log.norm_drift(), 3) +
                " dE/E=" + detail::fmt(out.run.log.energy_drift(), 3);
    return r;
}

inline ScenarioResult run_scaling_sweep(const ExperimentConfig& c) {
    detail::Writer w(c);
    ScenarioResult r;
    std::vector<double> xs, tdec, ginf, mu, var, skew;
    for (double v : c.values) {
        ExperimentConfig one = c;
        one.resume.clear();
        if (c.sweep == "g") {
            one.g = v;
        } else {
            one.N = static_cast<int>(v);
        }
        detail::CoherenceOutcome out;
        try {
            out = detail::coherence_run(one, detail::tdhf_start(one));
        } catch (const RunDiverged& e) {
            throw ScenarioFailed(std::string("scaling-sweep: ") + e.what(), r);
        }
        xs.push_back(v);
        tdec.push_back(out.t_dec);
        ginf.push_back(out.trace.G_inf);
        mu.push_back(out.stats ? out.stats->mean : std::nan(""));
        var.push_back(out.stats ? out.stats->variance : std::nan(""));
        skew.push_back(out.stats ? out.stats->skewness : std::nan(""));
    }
    io::Table t;
    t.add(c.sweep, xs);
    t.add("t_dec", tdec);
    t.add("G_inf", ginf);
    t.add("mu_T", mu);
    t.add("var_T", var);
    t.add("skew_T", skew);
    w.csv(r, t, "");
    nlohmann::json fits;
    auto usable = [](const std::vector<double>& a) {
        return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v) && v > 0; });
    };
    std::string line = "scaling-sweep over " + c.sweep + ":";
    if (usable(tdec)) {
        const auto f = fit_power_law(xs, tdec);
        fits["t_dec_power_law"] = {{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r2", f.r2}};
        line += " t_dec exponent=" + detail::fmt(f.exponent, 4);
        if (c.sweep == "N" && xs.size() >= 4) {
            const auto s = fit_saturation(xs, tdec);
            fits["t_dec_saturation"] = {{"A", s.A}, {"c", s.c}, {"residual", s.residual}, {"boundary", s.boundary}};
            line += " saturation c=" + detail::fmt(s.c, 4);
        }
    } else {
        line += " t_dec not finite for every value";
    }
    if (usable(mu)) {
        const auto f = fit_power_law(xs, mu);
        fits["mu_T_power_law"] = {{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r2", f.r2}};
        line += " mu_T exponent=" + detail::fmt(f.exponent, 4);
        if (c.sweep == "g") {
            const auto l = fit_linear(xs, mu);
            fits["mu_T_linear"] = {{"slope", l.slope}, {"intercept", l.intercept}, {"r2", l.r2}};
        }
    }
    if (usable(var)) {
        const auto f = fit_power_law(xs, var);
        fits["var_T_power_law"] = {{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r2", f.r2}};
    }
    w.json(r, fits, ".fits");
    w.echo(r);
    r.summary = line;
    return r;
}

inline ScenarioResult run_scenario(const ExperimentConfig& c) {
    const auto errors = validate(c);
    if (!errors.empty()) {
        std::string msg;
        for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
        throw ValidationError(msg);
    }
    if (c.scenario == "ideal-carpet") return run_ideal_carpet(c);
    if (c.scenario == "depths") return run_depths(c);
    if (c.scenario == "widths") return run_widths(c);
    if (c.scenario == "temperature") return run_temperature(c);
    if (c.scenario == "tdhf") return run_tdhf(c);
    if (c.scenario == "coherence") return run_coherence(c);
    return run_scaling_sweep(c);
}

}  // namespace fcarpet::cli
