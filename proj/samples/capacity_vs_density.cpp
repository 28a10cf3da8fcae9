// Capacity bounds of the 2-tier scenario at a few densities, next to a
// Monte Carlo estimate of the same quantity.
#include <cstdio>

#include "hcn/montecarlo.hpp"
#include "hcn/outage.hpp"
#include "hcn/presets.hpp"

int main() {
    constexpr double gamma = hcn::presets::kTargetOutage;
    std::printf("%8s %10s %10s %10s %16s\n", "kappa", "lower", "upper", "heuristic", "monte carlo");
    for (double kappa : {0.5, 1.0, 2.0, 5.0}) {
        const auto cfg = hcn::presets::two_tier(kappa);
        const auto bounds = hcn::barss_capacity_bounds(cfg, gamma);

        hcn::SimSpec sim;
        sim.trials = 20000;
        sim.seed = 2024;
        const auto est = hcn::empirical_capacity(hcn::Simulator(cfg, sim).run(), gamma);

        std::printf("%8.3f %10.4f %10.4f %10.4f %9.4f +- %.4f\n", kappa, bounds.lower, bounds.upper, bounds.heuristic,
                    est.value, est.error);
    }
}
