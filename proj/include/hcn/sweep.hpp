#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <memory>
#include <span>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hcn/error.hpp"
#include "hcn/outage.hpp"
#include "hcn/presets.hpp"

namespace hcn {

enum class SweepVariable { kappa, tau, gamma };

inline const char* to_string(SweepVariable v) noexcept {
    switch (v) {
        case SweepVariable::kappa: return "kappa";
        case SweepVariable::tau: return "tau";
        case SweepVariable::gamma: return "gamma";
    }
    return "?";
}

struct SweepSpec {
    SweepVariable variable = SweepVariable::kappa;
    std::vector<double> grid;
    /// Held fixed while another variable moves.
    double kappa = 1.0;  ///< multiplies every tier intensity of the base config
    double tau = 0.5;
    double gamma = presets::kTargetOutage;
    OutageOptions options;
    unsigned threads = 0;  ///< 0 = hardware concurrency

    void check() const {
        if (grid.empty()) {
            throw InvalidInput("sweep grid is empty");
        }
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (!(grid[i] > grid[i - 1])) {
                throw InvalidInput("sweep grid must be strictly increasing");
            }
        }
        for (double v : grid) {
            const bool ok = variable == SweepVariable::kappa   ? v > 0.0
                            : variable == SweepVariable::tau   ? v >= 0.0
                                                               : v > 0.0 && v < 1.0;
            if (!ok) {
                throw InvalidInput(std::string("sweep grid value out of range for ") + to_string(variable));
            }
        }
        if (!(kappa > 0.0) || !(tau >= 0.0) || !(gamma > 0.0 && gamma < 1.0)) {
            throw InvalidInput("fixed sweep parameters out of range");
        }
    }
};

/// One CSV row. For tau sweeps the triple is an outage probability, otherwise a capacity.
struct SweepRow {
    double value = 0.0;
    Bounds bounds;
    bool ceiling_hit = false;
    std::vector<double> p_star;
};

namespace detail {

/// Runs fn(i) for i in [0, n) on a small pool; results land by index.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline Bounds capacity_triple(const CapacityBounds& c) { return {c.lower, c.upper, c.heuristic}; }

}  // namespace detail

/// Evaluates the BARSS bounds along the grid. Rows come back in grid order.
inline std::vector<SweepRow> run_bounds_sweep(const NetworkConfig& base, const SweepSpec& spec) {
    spec.check();
    validate_network(base);
    std::vector<SweepRow> rows(spec.grid.size());
    switch (spec.variable) {
        case SweepVariable::kappa:
            detail::parallel_for(spec.grid.size(), spec.threads, [&](std::size_t i) {
                BarssOutage eval(base.scaled_intensities(spec.grid[i]), spec.options);
                const auto c = eval.capacity(spec.gamma);
                rows[i] = {spec.grid[i], detail::capacity_triple(c), c.ceiling_hit(), eval.association().p_star()};
            });
            break;
        case SweepVariable::tau: {
            // One evaluator per worker so the per-distance moment cache is shared along tau.
            const auto cfg = base.scaled_intensities(spec.kappa);
            const unsigned workers = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.threads;
            std::vector<std::unique_ptr<BarssOutage>> evals(std::min<std::size_t>(workers, spec.grid.size()));
            for (auto& e : evals) e = std::make_unique<BarssOutage>(cfg, spec.options);
            detail::parallel_for(spec.grid.size(), static_cast<unsigned>(evals.size()), [&](std::size_t i) {
                auto& eval = *evals[i % evals.size()];
                rows[i] = {spec.grid[i], eval.outage(spec.grid[i]), false, eval.association().p_star()};
            });
            break;
        }
        case SweepVariable::gamma: {
            BarssOutage eval(base.scaled_intensities(spec.kappa), spec.options);
            const auto caps = eval.capacities(spec.grid);
            for (std::size_t i = 0; i < caps.size(); ++i) {
                rows[i] = {spec.grid[i], detail::capacity_triple(caps[i]), caps[i].ceiling_hit(),
                           eval.association().p_star()};
            }
            break;
        }
    }
    return rows;
}

/// Header: <variable>,lower,upper,heuristic,ceiling_hit,p_1..p_K.
/// Reals are printed as %.17e; ceiling_hit is 0/1 (always 0 for tau sweeps).
inline void write_sweep_csv(std::ostream& os, SweepVariable variable, std::span<const SweepRow> rows) {
    const std::size_t k = rows.empty() ? 0 : rows.front().p_star.size();
    os << to_string(variable) << ",lower,upper,heuristic,ceiling_hit";
    for (std::size_t i = 1; i <= k; ++i) os << ",p_" << i;
    os << '\n';
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17e", v);
        os << buf;
    };
    for (const auto& r : rows) {
        put(r.value);
        for (double v : {r.bounds.lower, r.bounds.upper, r.bounds.heuristic}) {
            os << ',';
            put(v);
        }
        os << ',' << (r.ceiling_hit ? 1 : 0);
        for (double p : r.p_star) {
            os << ',';
            put(p);
        }
        os << '\n';
    }
}

/// A named series of a figure preset.
struct PresetSeries {
    std::string name;  ///< also the CSV file stem
    NetworkConfig base;
    SweepSpec spec;
};

namespace presets {

inline constexpr double kKappaLow = 0.1;
inline constexpr double kKappaHigh = 10.0;
inline constexpr std::size_t kKappaPoints = 20;

inline std::vector<double> default_kappa_grid() { return log_grid(kKappaLow, kKappaHigh, kKappaPoints); }
inline std::vector<double> default_gamma_grid() { return linear_grid(0.05, 0.75, 15); }
inline constexpr double kFig2Kappas[] = {0.1, 1.0, 10.0};

/// Capacity bounds against kappa at gamma = 0.15 for 2 and 3 tiers, alpha in {3, 4}.
inline std::vector<PresetSeries> fig1(const OutageOptions& opts = {}) {
    std::vector<PresetSeries> out;
    for (std::size_t tiers : {2u, 3u}) {
        for (double alpha : {3.0, 4.0}) {
            SweepSpec s;
            s.variable = SweepVariable::kappa;
            s.grid = default_kappa_grid();
            s.gamma = kTargetOutage;
            s.options = opts;
            out.push_back({"fig1_tiers" + std::to_string(tiers) + "_alpha" + std::to_string(static_cast<int>(alpha)),
                           hcn_scenario(tiers, 1.0, alpha), s});
        }
    }
    return out;
}

/// Capacity bounds against gamma for the 2-tier scenario, alpha = 3, at several kappa.
inline std::vector<PresetSeries> fig2(const OutageOptions& opts = {}) {
    std::vector<PresetSeries> out;
    for (double kappa : kFig2Kappas) {
        SweepSpec s;
        s.variable = SweepVariable::gamma;
        s.grid = default_gamma_grid();
        s.kappa = kappa;
        s.options = opts;
        char name[64];
        std::snprintf(name, sizeof name, "fig2_kappa%g", kappa);
        out.push_back({name, hcn_scenario(2, 1.0, 3.0), s});
    }
    return out;
}

}  // namespace presets

}  // namespace hcn
