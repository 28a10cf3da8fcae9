#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hcn/association.hpp"
#include "hcn/config_io.hpp"
#include "hcn/interference.hpp"
#include "hcn/montecarlo.hpp"
#include "hcn/outage.hpp"

namespace hcn {

struct ValidationSpec {
    std::uint64_t seed = 1;
    std::size_t trials = 10000;
    XiVariant xi = XiVariant::printed;
    double gamma = 0.15;
    unsigned threads = 0;
};

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Band containment of one (tier, distance) conditioning for one Xi variant.
struct VariantResult {
    XiVariant xi;
    std::size_t tier;
    double distance;
    double excess;  ///< largest excursion outside the sampling-inflated band (<= 0 inside)
};

struct ValidationReport {
    ValidationSpec spec;
    NetworkConfig config;
    std::vector<Check> checks;
    std::vector<VariantResult> variants;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json doc;
        doc["seed"] = spec.seed;
        doc["trials"] = spec.trials;
        doc["variant"] = to_string(spec.xi);
        doc["gamma"] = spec.gamma;
        doc["config"] = config_to_json(config);
        doc["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            doc["checks"].push_back(
                {{"name", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"pass", c.pass}});
        }
        doc["band_variants"] = nlohmann::ordered_json::array();
        for (const auto& v : variants) {
            doc["band_variants"].push_back({{"variant", to_string(v.xi)},
                                            {"tier", v.tier + 1},
                                            {"distance", v.distance},
                                            {"excess", v.excess},
                                            {"contained", v.excess <= 0.0}});
        }
        doc["passed"] = passed();
        return doc;
    }
};

/// Standardized-interference grid used by the band checks.
inline std::vector<double> band_grid() {
    std::vector<double> xs(25);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -3.0 + 0.25 * static_cast<double>(i);
    return xs;
}

/// Largest excursion of the empirical CDF of (I - mean)/sd outside
/// [band.lower - 3 se, band.upper + 3 se] over `xs`; se = sqrt(F(1-F)/n)
/// floored at 1/n. Non-positive means contained.
inline double band_excess(std::vector<double> interference, const InterferenceMoments& m, std::span<const double> xs) {
    std::sort(interference.begin(), interference.end());
    const double n = static_cast<double>(interference.size());
    double worst = -kInfinity;
    for (double x : xs) {
        const double level = m.mean + x * m.stddev();
        const double f =
            static_cast<double>(std::upper_bound(interference.begin(), interference.end(), level) - interference.begin()) / n;
        const double se = std::max(std::sqrt(f * (1.0 - f) / n), 1.0 / n);
        const auto band = gaussian_cdf_band(m, x);
        worst = std::max({worst, band.lower - 3.0 * se - f, f - band.upper - 3.0 * se});
    }
    return worst;
}

namespace detail {

inline Check within(std::string name, double measured, double tolerance) {
    return {std::move(name), measured, tolerance, measured <= tolerance};
}

/// Distance of v outside [lo, hi].
inline double outside(double v, double lo, double hi) { return std::max({0.0, lo - v, v - hi}); }

inline std::string tier_suffix(std::size_t k) { return "_tier" + std::to_string(k + 1); }

}  // namespace detail

/// Runs every cross-module oracle check on one scenario. Deterministic for a fixed spec.
inline ValidationReport run_validation(const NetworkConfig& input, const ValidationSpec& spec) {
    if (spec.trials < 1000) {
        throw InvalidInput("validation needs at least 1000 trials");
    }
    const NetworkConfig cfg = validate_network(input);
    const std::size_t kk = cfg.tier_count();
    ValidationReport rep{spec, cfg, {}, {}};
    using detail::within;

    // Association statistics.
    const AssociationStats assoc(cfg);
    double total = 0.0;
    for (double p : assoc.p_star()) total += p;
    rep.checks.push_back(within("association_sum", std::abs(total - 1.0), 1e-6));
    for (std::size_t k = 0; k < kk; ++k) {
        if (!(assoc.p_star(k) > 0.0)) continue;
        const double mass =
            detail::integrate_over_segments(assoc.table(k), [&](double u) { return assoc.pdf(k, u); },
                                            detail::kAssociationQuadrature);
        rep.checks.push_back(within("distance_pdf_normalization" + detail::tier_suffix(k), std::abs(mass - 1.0), 1e-6));
    }

    // BARSS drops.
    SimSpec sim;
    sim.trials = spec.trials;
    sim.seed = spec.seed;
    sim.threads = spec.threads;
    const Simulator barss(cfg, sim);
    const auto drops = barss.run();
    const double n = static_cast<double>(drops.size());
    std::vector<std::vector<double>> served(kk);
    for (const auto& d : drops) {
        if (d.tier) served[*d.tier].push_back(d.distance);
    }
    for (std::size_t k = 0; k < kk; ++k) {
        const double p = assoc.p_star(k);
        const double freq = static_cast<double>(served[k].size()) / n;
        rep.checks.push_back(
            within("mc_association" + detail::tier_suffix(k), std::abs(freq - p), 3.0 * std::sqrt(p * (1.0 - p) / n)));
    }

    // Conditional interference at the median serving distance of each tier.
    const auto xs = band_grid();
    for (std::size_t k = 0; k < kk; ++k) {
        if (served[k].size() < 100) continue;
        const double r = empirical_quantile(served[k], 0.5);
        SimSpec g = sim;
        g.policy = Policy::generic;
        g.generic = {k, r, barss_exclusions(cfg, k, r)};
        g.seed = spec.seed + 1 + k;
        const auto gd = Simulator(cfg, g).run();
        std::vector<double> samples;
        samples.reserve(gd.size());
        for (const auto& d : gd) samples.push_back(d.interference);
        const auto m = interference_moments(cfg, g.generic.exclusions, spec.xi);

        CompensatedSum s1;
        for (double v : samples) s1 += v;
        const double mean = s1.value() / n;
        CompensatedSum s2;
        CompensatedSum s4;
        for (double v : samples) {
            const double c = (v - mean) * (v - mean);
            s2 += c;
            s4 += c * c;
        }
        const double var = s2.value() / (n - 1.0);
        const double m4 = s4.value() / n;
        const std::string sfx = detail::tier_suffix(k);
        rep.checks.push_back(within("interference_mean" + sfx, std::abs(mean - m.mean), 3.0 * std::sqrt(var / n)));
        rep.checks.push_back(
            within("interference_variance" + sfx, std::abs(var - m.variance), 3.0 * std::sqrt(std::max(m4 - var * var, 0.0) / n)));
        rep.checks.push_back(within("gaussian_band" + sfx, band_excess(samples, m, xs), 0.0));
        for (XiVariant v : {XiVariant::printed, XiVariant::campbell}) {
            rep.variants.push_back({v, k, r, band_excess(samples, interference_moments(cfg, g.generic.exclusions, v), xs)});
        }
    }

    // Window sufficiency: doubling the window moves the mean interference by < 0.5%
    // (or by less than the sampling noise of the difference).
    {
        SimSpec a = sim;
        a.policy = Policy::generic;
        a.generic = {0, 0.0, ExclusionVector(kk, 0.0)};
        SimSpec b = a;
        b.window_radius = 2.0 * Simulator(cfg, a).window_radius();
        b.seed = spec.seed + 1000;
        auto stats = [](const std::vector<DropResult>& ds) {
            CompensatedSum s1;
            CompensatedSum s2;
            for (const auto& d : ds) {
                s1 += d.interference;
                s2 += d.interference * d.interference;
            }
            const double m = s1.value() / static_cast<double>(ds.size());
            return std::pair{m, std::max(s2.value() / static_cast<double>(ds.size()) - m * m, 0.0)};
        };
        const auto [ma, va] = stats(Simulator(cfg, a).run());
        const auto [mb, vb] = stats(Simulator(cfg, b).run());
        const double noise = 3.0 * std::sqrt((va + vb) / n) / ma;
        rep.checks.push_back(within("window_sufficiency", std::abs(mb - ma) / ma, std::max(0.005, noise)));
    }

    // Outage and capacity containment.
    OutageOptions opts;
    opts.xi = spec.xi;
    BarssOutage eval(cfg, opts);
    std::vector<double> rates;
    rates.reserve(drops.size());
    for (const auto& d : drops) rates.push_back(d.empty_window() ? 0.0 : d.rate);
    for (double q : {0.05, 0.15, 0.5, 0.85}) {
        const double tau = empirical_quantile(rates, q);
        const auto emp = empirical_outage(drops, tau);
        const auto b = eval.outage(tau);
        char name[64];
        std::snprintf(name, sizeof name, "outage_containment_q%02d", static_cast<int>(std::lround(q * 100)));
        rep.checks.push_back(within(name, detail::outside(emp.value, b.lower, b.upper), 3.0 * emp.error));
    }
    const auto emp_cap = empirical_capacity(drops, spec.gamma);
    const double gammas[] = {0.05, spec.gamma, 0.5};
    std::vector<double> gs(std::begin(gammas), std::end(gammas));
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    const auto caps = eval.capacities(gs);
    const auto& cap = caps[static_cast<std::size_t>(std::find(gs.begin(), gs.end(), spec.gamma) - gs.begin())];
    rep.checks.push_back(within("capacity_containment", detail::outside(emp_cap.value, cap.lower, cap.upper), emp_cap.error));
    rep.checks.push_back(within("capacity_ceiling_not_hit", cap.ceiling_hit() ? 1.0 : 0.0, 0.0));

    // Shape properties.
    double sandwich = 0.0;
    double drop_lower = 0.0;
    double drop_upper = 0.0;
    {
        const auto grid = presets::linear_grid(0.0, std::min(eval.ceiling(), 2.0 * cap.upper + 1.0), 25);
        const auto curve = outage_curve([&](double t) { return eval.outage(t); }, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            sandwich = std::max(sandwich, curve.raw[i].lower - curve.raw[i].upper);
            if (i > 0) {
                drop_lower = std::max(drop_lower, curve.lower_envelope[i - 1] - curve.lower_envelope[i]);
                drop_upper = std::max(drop_upper, curve.upper_envelope[i - 1] - curve.upper_envelope[i]);
            }
        }
    }
    rep.checks.push_back(within("outage_sandwich", sandwich, 0.0));
    rep.checks.push_back(within("outage_monotone_tau", std::max(drop_lower, drop_upper), 0.0));
    double cap_drop = 0.0;
    for (std::size_t i = 1; i < caps.size(); ++i) {
        cap_drop = std::max({cap_drop, caps[i - 1].lower - caps[i].lower, caps[i - 1].upper - caps[i].upper});
    }
    rep.checks.push_back(within("capacity_monotone_gamma", cap_drop, 0.0));
    return rep;
}

}  // namespace hcn
