#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hcn/config_io.hpp"
#include "hcn/montecarlo.hpp"
#include "hcn/outage.hpp"
#include "hcn/sweep.hpp"
#include "hcn/validation.hpp"

namespace {

enum Exit : int { ok = 0, checks_failed = 1, bad_input = 2, numeric_failure = 3 };

struct Common {
    std::string config;
    std::string out;
    std::string variant = "xi-printed";
    std::uint64_t seed = 1;
    std::size_t trials = 10000;
    unsigned threads = 0;
};

hcn::XiVariant parse_variant(const std::string& s) {
    if (s == "xi-printed") return hcn::XiVariant::printed;
    if (s == "xi-campbell") return hcn::XiVariant::campbell;
    throw hcn::InvalidInput("unknown variant '" + s + "'");
}

hcn::NetworkConfig load(const Common& c) {
    if (c.config.empty()) {
        throw hcn::InvalidInput("--config is required");
    }
    return hcn::validate_network(hcn::load_config(c.config));
}

/// Writes to --out if given, stdout otherwise.
template <class F>
void emit(const std::string& path, F&& write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw hcn::InvalidInput("cannot write '" + path + "'");
    }
    write(os);
}

int run_bounds(const Common& c, double kappa, double gamma, std::optional<double> tau) {
    hcn::OutageOptions opts;
    opts.xi = parse_variant(c.variant);
    hcn::BarssOutage eval(load(c).scaled_intensities(kappa), opts);
    const auto cap = eval.capacity(gamma);
    nlohmann::ordered_json doc;
    doc["kappa"] = kappa;
    doc["variant"] = c.variant;
    doc["association"] = eval.association().p_star();
    doc["capacity"] = {{"gamma", gamma},         {"lower", cap.lower},
                       {"upper", cap.upper},     {"heuristic", cap.heuristic},
                       {"ceiling", cap.ceiling}, {"ceiling_hit", cap.ceiling_hit()},
                       {"lower_at_floor", cap.lower_at_floor}};
    if (tau) {
        const auto b = eval.outage(*tau);
        doc["outage"] = {{"tau", *tau}, {"lower", b.lower}, {"upper", b.upper}, {"heuristic", b.heuristic}};
    }
    emit(c.out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    return Exit::ok;
}

int run_simulate(const Common& c, double kappa, double gamma) {
    hcn::SimSpec spec;
    spec.seed = c.seed;
    spec.trials = c.trials;
    spec.threads = c.threads;
    const auto cfg = load(c).scaled_intensities(kappa);
    const hcn::Simulator sim(cfg, spec);
    const auto drops = sim.run();
    std::vector<std::size_t> counts(cfg.tier_count(), 0);
    std::size_t empty = 0;
    for (const auto& d : drops) {
        if (d.tier) {
            ++counts[*d.tier];
        } else {
            ++empty;
        }
    }
    nlohmann::ordered_json doc;
    doc["seed"] = c.seed;
    doc["trials"] = c.trials;
    doc["kappa"] = kappa;
    doc["window_radius"] = sim.window_radius();
    doc["association_counts"] = counts;
    doc["empty_windows"] = empty;
    if (drops.size() >= 1000) {
        const auto cap = hcn::empirical_capacity(drops, gamma);
        doc["capacity"] = {{"gamma", gamma}, {"value", cap.value}, {"error", cap.error}};
    }
    if (!c.out.empty()) {
        emit(c.out, [&](std::ostream& os) { hcn::write_drops_csv(os, drops); });
    }
    std::cout << doc.dump(2) << '\n';
    return Exit::ok;
}

int run_validate(const Common& c, double kappa) {
    hcn::ValidationSpec spec;
    spec.seed = c.seed;
    spec.trials = c.trials;
    spec.xi = parse_variant(c.variant);
    spec.threads = c.threads;
    const auto report = hcn::run_validation(load(c).scaled_intensities(kappa), spec);
    emit(c.out, [&](std::ostream& os) { os << report.to_json().dump(2) << '\n'; });
    for (const auto& chk : report.checks) {
        if (!chk.pass) {
            std::fprintf(stderr, "check failed: %s (measured %.6g, tolerance %.6g)\n", chk.name.c_str(), chk.measured,
                         chk.tolerance);
        }
    }
    return report.passed() ? Exit::ok : Exit::checks_failed;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(item, &used));
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw hcn::InvalidInput("bad grid value '" + item + "'");
        }
    }
    return out;
}

int run_sweep(const Common& c, const std::string& preset, const std::string& variable, const std::string& grid,
              double kappa, double tau, double gamma) {
    hcn::OutageOptions opts;
    opts.xi = parse_variant(c.variant);
    if (!preset.empty()) {
        const auto series = preset == "fig1"   ? hcn::presets::fig1(opts)
                            : preset == "fig2" ? hcn::presets::fig2(opts)
                                               : throw hcn::InvalidInput("unknown preset '" + preset + "'");
        const std::filesystem::path dir = c.out.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out);
        std::filesystem::create_directories(dir);
        for (auto s : series) {
            s.spec.threads = c.threads;
            const auto rows = hcn::run_bounds_sweep(s.base, s.spec);
            const auto path = dir / (s.name + ".csv");
            emit(path.string(), [&](std::ostream& os) { hcn::write_sweep_csv(os, s.spec.variable, rows); });
            std::cerr << "wrote " << path.string() << '\n';
        }
        return Exit::ok;
    }
    hcn::SweepSpec spec;
    spec.variable = variable == "kappa" ? hcn::SweepVariable::kappa
                    : variable == "tau" ? hcn::SweepVariable::tau
                    : variable == "gamma"
                        ? hcn::SweepVariable::gamma
                        : throw hcn::InvalidInput("--var must be kappa, tau or gamma");
    spec.grid = parse_grid(grid);
    spec.kappa = kappa;
    spec.tau = tau;
    spec.gamma = gamma;
    spec.options = opts;
    spec.threads = c.threads;
    const auto rows = hcn::run_bounds_sweep(load(c), spec);
    emit(c.out, [&](std::ostream& os) { hcn::write_sweep_csv(os, spec.variable, rows); });
    return Exit::ok;
}

void add_common(CLI::App* app, Common& c, bool sim_flags) {
    app->add_option("--config", c.config, "scenario JSON file");
    app->add_option("--out", c.out, "output path");
    app->add_option("--variant", c.variant, "Berry-Esseen coefficient: xi-printed | xi-campbell")
        ->check(CLI::IsMember({"xi-printed", "xi-campbell"}));
    app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    if (sim_flags) {
        app->add_option("--seed", c.seed, "master seed");
        app->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"K-tier cellular network outage bounds and Monte Carlo validation"};
    app.require_subcommand(1);

    Common bounds_c;
    double bounds_kappa = 1.0;
    double bounds_gamma = 0.15;
    std::optional<double> bounds_tau;
    auto* bounds = app.add_subcommand("bounds", "capacity (and optional outage) bounds for one scenario");
    add_common(bounds, bounds_c, false);
    bounds->add_option("--kappa", bounds_kappa, "intensity multiplier");
    bounds->add_option("--gamma", bounds_gamma, "target outage probability");
    bounds->add_option("--tau", bounds_tau, "also report outage bounds at this rate (nats/s/Hz)");

    Common sim_c;
    double sim_kappa = 1.0;
    double sim_gamma = 0.15;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo drops; --out writes the raw drop CSV");
    add_common(simulate, sim_c, true);
    simulate->add_option("--kappa", sim_kappa, "intensity multiplier");
    simulate->add_option("--gamma", sim_gamma, "target outage probability for the empirical capacity");

    Common val_c;
    double val_kappa = 1.0;
    auto* validate = app.add_subcommand("validate", "run every oracle check; JSON report");
    add_common(validate, val_c, true);
    validate->add_option("--kappa", val_kappa, "intensity multiplier");

    Common sweep_c;
    std::string preset;
    std::string variable = "kappa";
    std::string grid;
    double sweep_kappa = 1.0;
    double sweep_tau = 0.5;
    double sweep_gamma = 0.15;
    auto* sweep = app.add_subcommand("sweep", "bounds along a grid; presets write one CSV per series into --out");
    add_common(sweep, sweep_c, false);
    sweep->add_option("--preset", preset, "fig1 | fig2")->check(CLI::IsMember({"fig1", "fig2"}));
    sweep->add_option("--var", variable, "swept variable: kappa | tau | gamma");
    sweep->add_option("--grid", grid, "comma-separated, strictly increasing");
    sweep->add_option("--kappa", sweep_kappa, "fixed intensity multiplier");
    sweep->add_option("--tau", sweep_tau, "fixed rate");
    sweep->add_option("--gamma", sweep_gamma, "fixed target outage probability");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Exit::ok : Exit::bad_input;
    }

    try {
        if (*bounds) return run_bounds(bounds_c, bounds_kappa, bounds_gamma, bounds_tau);
        if (*simulate) return run_simulate(sim_c, sim_kappa, sim_gamma);
        if (*validate) return run_validate(val_c, val_kappa);
        if (*sweep) return run_sweep(sweep_c, preset, variable, grid, sweep_kappa, sweep_tau, sweep_gamma);
    } catch (const hcn::ValidationError& e) {
        std::fprintf(stderr, "invalid configuration [%s]: %s\n", hcn::to_string(e.failure()), e.what());
        return Exit::bad_input;
    } catch (const hcn::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return Exit::bad_input;
    } catch (const hcn::InvalidInput& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return Exit::bad_input;
    } catch (const hcn::ConvergenceFailure& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return Exit::numeric_failure;
    } catch (const hcn::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return Exit::numeric_failure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return Exit::numeric_failure;
    }
    return Exit::bad_input;
}
