#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "hcn/model.hpp"

namespace hcn::presets {

/// Simulation-study scenario: Nakagami m = 5, G(x) = 1/(1 + x^alpha) for every
/// tier, no biasing, N0 = 0, PG = 25, P1 = 4 P2 = 16 P3 and
/// lambda = (0.1, 1, 5) * kappa. `tiers` selects the first 2 or 3 tiers.
inline NetworkConfig hcn_scenario(std::size_t tiers, double kappa, double alpha) {
    constexpr double powers[] = {16.0, 4.0, 1.0};
    constexpr double densities[] = {0.1, 1.0, 5.0};
    if (tiers < 1 || tiers > 3) {
        throw InvalidInput("scenario presets have 1 to 3 tiers");
    }
    NetworkConfig cfg;
    cfg.noise = 0.0;
    cfg.processing_gain = 25.0;
    for (std::size_t i = 0; i < tiers; ++i) {
        cfg.tiers.push_back({powers[i], densities[i] * kappa, 1.0, PathLossModel::bounded_power(alpha),
                             FadingModel::nakagami(5.0)});
    }
    return cfg;
}

inline NetworkConfig two_tier(double kappa, double alpha = 3.0) { return hcn_scenario(2, kappa, alpha); }
inline NetworkConfig three_tier(double kappa, double alpha = 3.0) { return hcn_scenario(3, kappa, alpha); }

inline constexpr double kTargetOutage = 0.15;

/// n log-spaced points on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = lo * std::pow(hi / lo, t);
    }
    return out;
}

/// n evenly spaced points on [lo, hi].
inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = lo + (hi - lo) * t;
    }
    return out;
}

}  // namespace hcn::presets
