#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"
#include "fcarpet/io/csv.hpp"

namespace fcarpet::cli {

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"ideal-carpet", "depths",    "widths",       "temperature",
                                                "tdhf",         "coherence", "scaling-sweep"};
    return names;
}

/// Every experiment parameter. Times are in units of T_rev; other
/// quantities use hbar = m = L = 1.
struct ExperimentConfig {
    std::string scenario = "ideal-carpet";

    // physics
    int N = 100;
    double D = 0.5;
    std::string trap = "subbox";  // subbox | harmonic
    double omega = 1600.0;
    double center = 0.5;
    double g = 16.0;
    std::vector<double> temperatures{0.0, 0.5, 1.0, 2.0, 4.0};  // units of T_F
    int k_max = 0;                                             // 0: automatic
    int p_max = 8;
    int p = 1;

    // numerics
    int n_points = 400;
    double dt = 1e-7;
    std::optional<double> t_end;  // T_rev units; scenario default when unset
    int n_times = 200;
    int sample_every = 1000;
    int threads = 0;
    unsigned long seed = 12345;
    int search = 3;
    int width_samples = 9;

    // sweep
    std::string sweep = "g";  // g | N
    std::vector<double> values{8.0, 16.0, 32.0};

    // output
    std::string out_dir = "out";
    std::string prefix;  // defaults to the scenario name
    bool png = true;
    std::string scale = "linear";  // linear | percentile
    double clip_percent = 1.0;
    std::string checkpoint;  // write the final TDHF state here
    std::string resume;      // start TDHF from this checkpoint

    [[nodiscard]] double t_end_or_default() const {
        if (t_end) return *t_end;
        if (scenario == "ideal-carpet") return 1.0;
        if (scenario == "coherence" || scenario == "scaling-sweep") return 0.6;
        return 0.15;
    }
    [[nodiscard]] std::string stem() const { return prefix.empty() ? scenario : prefix; }
};

/// Field-level validation; returns one "field: problem" message per failure.
inline std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> e;
    auto need = [&e](bool ok, const std::string& msg) {
        if (!ok) e.push_back(msg);
    };
    const auto& names = scenario_names();
    need(std::find(names.begin(), names.end(), c.scenario) != names.end(), "scenario: unknown scenario '" + c.scenario + "'");
    need(c.N >= 1, "N: must be >= 1 (got " + std::to_string(c.N) + ")");
    need(c.D > 0 && c.D <= 1, "D: must lie in (0, 1] (got " + io::format_double(c.D) + ")");
    need(c.trap == "subbox" || c.trap == "harmonic", "trap: must be 'subbox' or 'harmonic' (got '" + c.trap + "')");
    need(c.omega > 0, "omega: must be > 0");
    need(c.center >= 0 && c.center <= 1, "center: must lie in [0, 1]");
    need(std::isfinite(c.g), "g: must be finite");
    need(c.k_max >= 0, "k_max: must be >= 0");
    need(c.p_max >= 1, "p_max: must be >= 1");
    need(c.p != 0, "p: must be nonzero");
    for (double T : c.temperatures) need(T >= 0, "temperatures: must be >= 0");
    need(c.n_points >= 8, "n_points: must be >= 8");
    need(c.dt > 0, "dt: must be > 0");
    if (c.t_end) need(*c.t_end >= 0 && *c.t_end <= 1, "t_end: must lie in [0, 1] (units of T_rev)");
    need(c.n_times >= 1, "n_times: must be >= 1");
    need(c.sample_every >= 1, "sample_every: must be >= 1");
    need(c.threads >= 0, "threads: must be >= 0");
    need(c.search >= 0, "search: must be >= 0");
    need(c.width_samples >= 3, "width_samples: must be >= 3");
    need(c.scale == "linear" || c.scale == "percentile", "scale: must be 'linear' or 'percentile'");
    need(c.clip_percent >= 0 && c.clip_percent < 50, "clip_percent: must lie in [0, 50)");
    need(c.sweep == "g" || c.sweep == "N", "sweep: must be 'g' or 'N'");
    const bool interacting = c.scenario == "tdhf" || c.scenario == "coherence" || c.scenario == "scaling-sweep";
    if (interacting) {
        need(c.N % 2 == 0, "N: must be even for scenario " + c.scenario + " (got " + std::to_string(c.N) + ")");
        need(c.n_points % 2 == 0, "n_points: must be even for scenario " + c.scenario);
        need(c.N / 2 <= c.n_points / 8, "N: N/2 must be <= n_points/8 (got N=" + std::to_string(c.N) +
                                             ", n_points=" + std::to_string(c.n_points) + ")");
        if (c.resume.empty()) {
            const double steps = c.t_end_or_default() * 4.0 / 3.14159265358979323846 / c.dt;
            need(steps < 5e8, "dt: t_end / dt exceeds 5e8 steps");
        }
    }
    if (c.scenario == "scaling-sweep") {
        need(c.values.size() >= 3, "values: scaling-sweep needs at least 3 values");
        if (c.sweep == "N") {
            for (double v : c.values) {
                need(v >= 2 && std::fmod(v, 2.0) == 0.0 && v / 2 <= c.n_points / 8,
                     "values: N values must be even and <= n_points/4 (got " + io::format_double(v) + ")");
            }
        }
    }
    if ((c.scenario == "depths" || c.scenario == "widths" || c.scenario == "temperature") && c.trap != "subbox") {
        e.push_back("trap: scenario " + c.scenario + " supports only 'subbox'");
    }
    return e;
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_double(v[i]);
    return s;
}

/// Sectioned INI text that reproduces `c` when read back.
inline std::string to_ini(const ExperimentConfig& c) {
    std::ostringstream os;
    const auto f = [](double v) { return io::format_double(v); };
    os << "scenario = " << c.scenario << "\n\n"
       << "[physics]\n"
       << "N = " << c.N << "\nD = " << f(c.D) << "\ntrap = " << c.trap << "\nomega = " << f(c.omega)
       << "\ncenter = " << f(c.center) << "\ng = " << f(c.g) << "\ntemperatures = " << join(c.temperatures)
       << "\nk_max = " << c.k_max << "\np_max = " << c.p_max << "\np = " << c.p << "\n\n"
       << "[numerics]\n"
       << "n_points = " << c.n_points << "\ndt = " << f(c.dt) << "\nt_end = " << f(c.t_end_or_default())
       << "\nn_times = " << c.n_times << "\nsample_every = " << c.sample_every << "\nthreads = " << c.threads
       << "\nseed = " << c.seed << "\nsearch = " << c.search << "\nwidth_samples = " << c.width_samples << "\n\n"
       << "[sweep]\n"
       << "sweep = " << c.sweep << "\nvalues = " << join(c.values) << "\n\n"
       << "[output]\n"
       << "out_dir = " << c.out_dir << "\nprefix = " << c.stem() << "\npng = " << (c.png ? "true" : "false")
       << "\nscale = " << c.scale << "\nclip_percent = " << f(c.clip_percent) << "\n";
    if (!c.checkpoint.empty()) os << "checkpoint = " << c.checkpoint << "\n";
    if (!c.resume.empty()) os << "resume = " << c.resume << "\n";
    return os.str();
}

/// Reads a sectioned INI file and returns it as `--key=value` arguments.
/// Section names only group keys; every key must be unique.
inline std::vector<std::string> ini_to_args(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    std::vector<std::string> args;
    std::vector<std::string> seen;
    auto add = [&](const std::string& key, const std::string& value) {
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw ValidationError("config: key '" + key + "' appears more than once");
        }
        seen.push_back(key);
        args.push_back("--" + key + "=" + value);
    };
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            add(name, node.data());
        } else {
            for (const auto& [key, leaf] : node) add(key, leaf.data());
        }
    }
    return args;
}

}  // namespace fcarpet::cli
