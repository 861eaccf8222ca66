#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fcarpet/cli/scenarios.hpp"

namespace {

using fcarpet::cli::ExperimentConfig;

std::vector<double> parse_list(const std::string& name, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(item, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
            throw fcarpet::ValidationError(name + ": cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) throw fcarpet::ValidationError(name + ": empty list");
    return out;
}

void bind(CLI::App& app, ExperimentConfig& c, std::string& temps, std::string& values, double& t_end) {
    const auto last = CLI::MultiOptionPolicy::TakeLast;
    std::string names;
    for (const auto& n : fcarpet::cli::scenario_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("scenario,--scenario", c.scenario, "one of: " + names)->multi_option_policy(last);

    app.add_option("--N", c.N, "atom number (both components for TDHF)")->multi_option_policy(last);
    app.add_option("--D", c.D, "initial sub-box width")->multi_option_policy(last);
    app.add_option("--trap", c.trap, "initial trap: subbox | harmonic")->multi_option_policy(last);
    app.add_option("--omega", c.omega, "harmonic trap frequency")->multi_option_policy(last);
    app.add_option("--center", c.center, "harmonic trap center")->multi_option_policy(last);
    app.add_option("--g", c.g, "interspecies coupling")->multi_option_policy(last);
    app.add_option("--temperatures", temps, "comma-separated T/T_F values")->multi_option_policy(last);
    app.add_option("--k_max", c.k_max, "mode cutoff, 0 for automatic")->multi_option_policy(last);
    app.add_option("--p_max", c.p_max, "largest |p| for depths")->multi_option_policy(last);
    app.add_option("--p", c.p, "structure index for widths and temperature")->multi_option_policy(last);

    app.add_option("--n_points", c.n_points, "grid intervals")->multi_option_policy(last);
    app.add_option("--dt", c.dt, "TDHF time step")->multi_option_policy(last);
    app.add_option("--t_end", t_end, "end time in units of T_rev")->multi_option_policy(last);
    app.add_option("--n_times", c.n_times, "carpet rows for ideal-carpet")->multi_option_policy(last);
    app.add_option("--sample_every", c.sample_every, "TDHF steps between samples")->multi_option_policy(last);
    app.add_option("--threads", c.threads, "worker threads, 0 for hardware")->multi_option_policy(last);
    app.add_option("--seed", c.seed, "random seed")->multi_option_policy(last);
    app.add_option("--search", c.search, "partner search half-width in cells")->multi_option_policy(last);
    app.add_option("--width_samples", c.width_samples, "sample times for widths")->multi_option_policy(last);

    app.add_option("--sweep", c.sweep, "swept parameter: g | N")->multi_option_policy(last);
    app.add_option("--values", values, "comma-separated sweep values")->multi_option_policy(last);

    app.add_option("--out_dir", c.out_dir, "output directory")->multi_option_policy(last);
    app.add_option("--prefix", c.prefix, "output file stem")->multi_option_policy(last);
    app.add_option("--png", c.png, "write PNG heatmaps (true | false)")->multi_option_policy(last);
    app.add_option("--scale", c.scale, "heatmap scale: linear | percentile")->multi_option_policy(last);
    app.add_option("--clip_percent", c.clip_percent, "percentile clip")->multi_option_policy(last);
    app.add_option("--checkpoint", c.checkpoint, "write final TDHF state here")->multi_option_policy(last);
    app.add_option("--resume", c.resume, "start TDHF from this checkpoint")->multi_option_policy(last);
}

void report(const fcarpet::cli::ScenarioResult& r) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (!r.summary.empty()) std::cout << r.summary << "\n";
    for (const auto& f : r.files) std::cout << "  wrote " << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    // A --config file is expanded in place ahead of the command line so later flags win.
    std::vector<std::string> merged;
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size()) {
                path = args[++i];
            } else if (args[i].rfind("--config=", 0) == 0) {
                path = args[i].substr(9);
            } else {
                continue;
            }
            auto from_file = fcarpet::cli::ini_to_args(path);
            merged.insert(merged.end(), from_file.begin(), from_file.end());
        }
    } catch (const fcarpet::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            ++i;
            continue;
        }
        if (args[i].rfind("--config=", 0) == 0) continue;
        merged.push_back(args[i]);
    }

    ExperimentConfig cfg;
    std::string temps = fcarpet::cli::join(cfg.temperatures);
    std::string values = fcarpet::cli::join(cfg.values);
    double t_end = -1;
    CLI::App app{"Fermionic carpets: ideal-gas and mean-field experiments"};
    app.set_config();  // --config is handled above
    bind(app, cfg, temps, values, t_end);
    app.add_option("--config", "sectioned INI file; command-line flags override it");

    std::reverse(merged.begin(), merged.end());
    try {
        app.parse(merged);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        cfg.temperatures = parse_list("temperatures", temps);
        cfg.values = parse_list("values", values);
        if (app.count("--t_end") > 0) cfg.t_end = t_end;
        report(fcarpet::cli::run_scenario(cfg));
        return 0;
    } catch (const fcarpet::cli::ScenarioFailed& e) {
        report(e.partial());
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fcarpet::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fcarpet::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fcarpet::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fcarpet::ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
