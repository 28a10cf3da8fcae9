// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "hcn/association.hpp"
#include "hcn/interference.hpp"
#include "hcn/montecarlo.hpp"
#include "hcn/outage.hpp"
#include "hcn/presets.hpp"
#include "hcn/sweep.hpp"
#include "hcn/validation.hpp"

namespace {

// Pinned tolerances.
constexpr double kGapAlpha3 = 0.06;
constexpr double kGapAlpha4 = 0.15;
constexpr double kSigmas = 3.0;
constexpr double kSumTol = 1e-6;
constexpr double kPdfMassTol = 1e-6;
constexpr double kClosedFormTol = 1e-10;
constexpr double kGamma = 0.15;
constexpr std::size_t kTrials = 100000;
constexpr std::uint64_t kSeed = 20240601;
constexpr double kKappas[] = {0.5, 1.0, 2.0};
constexpr double kQuantiles[] = {0.05, 0.15, 0.5, 0.85};

int failures = 0;

void verdict(int id, bool pass, const std::string& what) {
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

void info(const char* fmt, auto... args) {
    std::printf("  ");
    std::printf(fmt, args...);
    std::printf("\n");
    std::fflush(stdout);
}

double max_gap(const std::vector<hcn::SweepRow>& rows) {
    double g = 0.0;
    for (const auto& r : rows) g = std::max(g, r.bounds.gap());
    return g;
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct SweepSet {
    std::vector<hcn::SweepRow> t2a3, t2a4, t3a3, t3a4;
};

// Criteria 1, 2 and the kappa part of 7 share the kappa sweeps.
SweepSet kappa_sweeps() {
    SweepSet s;
    for (const auto& series : hcn::presets::fig1()) {
        auto rows = hcn::run_bounds_sweep(series.base, series.spec);
        if (series.name == "fig1_tiers2_alpha3") s.t2a3 = std::move(rows);
        if (series.name == "fig1_tiers2_alpha4") s.t2a4 = std::move(rows);
        if (series.name == "fig1_tiers3_alpha3") s.t3a3 = std::move(rows);
        if (series.name == "fig1_tiers3_alpha4") s.t3a4 = std::move(rows);
    }
    return s;
}

void criterion1(const SweepSet& s) {
    for (const auto* rows : {&s.t2a3, &s.t2a4}) {
        const char* label = rows == &s.t2a3 ? "alpha=3" : "alpha=4";
        for (const auto& r : *rows) {
            info("2-tier %s kappa=%.4f  C in [%.4f, %.4f]  gap %.4f%s", label, r.value, r.bounds.lower, r.bounds.upper,
                 r.bounds.gap(), r.ceiling_hit ? "  (ceiling)" : "");
        }
    }
    const double g3 = max_gap(s.t2a3);
    const double g4 = max_gap(s.t2a4);

    // For reference only: the same sweep with the Campbell-denominator Xi, which is
    // smaller by (2 pi)^1.5 but does not contain the simulated CDF (see criterion 6).
    hcn::OutageOptions campbell;
    campbell.xi = hcn::XiVariant::campbell;
    for (const auto& series : hcn::presets::fig1(campbell)) {
        if (series.name.rfind("fig1_tiers2", 0) != 0) continue;
        info("reference, campbell Xi, %s: max gap %.4f", series.name.c_str(),
             max_gap(hcn::run_bounds_sweep(series.base, series.spec)));
    }
    verdict(1, g3 <= kGapAlpha3 && g4 <= kGapAlpha4,
            fmt("2-tier max gap alpha=3 %.4f (tol %.2f), alpha=4 %.4f (tol %.2f)", g3, kGapAlpha3, g4, kGapAlpha4));
}

void criterion2(const SweepSet& s) {
    int worse = 0;
    double worst = -1e300;
    for (const auto& [two, three] : {std::pair{&s.t2a3, &s.t3a3}, std::pair{&s.t2a4, &s.t3a4}}) {
        for (std::size_t i = 0; i < two->size(); ++i) {
            const double d = (*three)[i].bounds.gap() - (*two)[i].bounds.gap();
            worst = std::max(worst, d);
            worse += d > 0.0;
        }
    }
    verdict(2, worse == 0, fmt("3-tier gap exceeds 2-tier gap at %d of %zu grid points (max excess %.4g)", worse,
                               2 * s.t2a3.size(), worst));
}

struct Scenario {
    std::size_t tiers;
    double kappa;
    hcn::NetworkConfig cfg;
    std::vector<hcn::DropResult> drops;
};

std::vector<Scenario> simulate_presets() {
    std::vector<Scenario> out;
    for (std::size_t tiers : {2u, 3u}) {
        for (double kappa : kKappas) {
            Scenario s{tiers, kappa, hcn::presets::hcn_scenario(tiers, kappa, 3.0), {}};
            hcn::SimSpec spec;
            spec.trials = kTrials;
            spec.seed = kSeed;
            s.drops = hcn::Simulator(s.cfg, spec).run();
            out.push_back(std::move(s));
        }
    }
    return out;
}

void criteria34(const std::vector<Scenario>& scenarios) {
    int pairs = 0;
    int outage_bad = 0;
    int cap_bad = 0;
    for (const auto& sc : scenarios) {
        hcn::BarssOutage eval(sc.cfg);
        std::vector<double> rates;
        for (const auto& d : sc.drops) rates.push_back(d.empty_window() ? 0.0 : d.rate);
        for (double q : kQuantiles) {
            const double tau = hcn::empirical_quantile(rates, q);
            const auto emp = hcn::empirical_outage(sc.drops, tau);
            const auto b = eval.outage(tau);
            const bool ok = emp.value >= b.lower - kSigmas * emp.error && emp.value <= b.upper + kSigmas * emp.error;
            info("%zu-tier kappa=%.1f tau=%.4f  MC %.4f +- %.4f  bound [%.4f, %.4f] %s", sc.tiers, sc.kappa, tau,
                 emp.value, emp.error, b.lower, b.upper, ok ? "" : "OUTSIDE");
            ++pairs;
            outage_bad += !ok;
        }
        const auto emp = hcn::empirical_capacity(sc.drops, kGamma);
        const auto c = eval.capacity(kGamma);
        const bool ok = emp.value >= c.lower - emp.error && emp.value <= c.upper + emp.error && !c.ceiling_hit();
        info("%zu-tier kappa=%.1f capacity  MC %.4f +- %.4f  bracket [%.4f, %.4f] %s", sc.tiers, sc.kappa, emp.value,
             emp.error, c.lower, c.upper, ok ? "" : "OUTSIDE");
        cap_bad += !ok;
    }
    verdict(3, pairs >= 12 && outage_bad == 0,
            fmt("%d of %d (scenario, tau) pairs inside the 3-sigma inflated outage band", pairs - outage_bad, pairs));
    verdict(4, cap_bad == 0,
            fmt("%zu of %zu scenarios with MC capacity inside the inflated bracket", scenarios.size() - cap_bad,
                scenarios.size()));
}

hcn::NetworkConfig random_config(std::mt19937_64& gen, int max_tiers) {
    std::uniform_int_distribution<int> tiers(1, max_tiers);
    std::uniform_real_distribution<double> logu(-1.5, 1.5);
    std::uniform_real_distribution<double> alpha(2.3, 5.0);
    std::uniform_real_distribution<double> m(0.6, 6.0);
    hcn::NetworkConfig cfg;
    cfg.processing_gain = 25.0;
    const int k = tiers(gen);
    for (int i = 0; i < k; ++i) {
        cfg.tiers.push_back({std::pow(10.0, logu(gen)), std::pow(10.0, logu(gen)), std::pow(10.0, 0.5 * logu(gen)),
                             hcn::PathLossModel::bounded_power(alpha(gen)), hcn::FadingModel::nakagami(m(gen))});
    }
    return cfg;
}

void criterion5(const std::vector<Scenario>& scenarios) {
    std::mt19937_64 gen(kSeed);
    double worst_sum = 0.0;
    double worst_mass = 0.0;
    for (int i = 0; i < 200; ++i) {
        const hcn::AssociationStats s(random_config(gen, 4));
        double total = 0.0;
        for (std::size_t k = 0; k < s.tier_count(); ++k) {
            total += s.p_star(k);
            if (!(s.p_star(k) > 1e-12)) continue;
            const double mass = hcn::detail::integrate_over_segments(
                s.table(k), [&](double u) { return s.pdf(k, u); }, hcn::detail::kAssociationQuadrature);
            worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
        }
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    }

    int freq_bad = 0;
    int freq_total = 0;
    for (const auto& sc : scenarios) {
        const hcn::AssociationStats s(sc.cfg);
        std::vector<double> counts(sc.cfg.tier_count(), 0.0);
        for (const auto& d : sc.drops) {
            if (d.tier) counts[*d.tier] += 1.0;
        }
        const double n = static_cast<double>(sc.drops.size());
        for (std::size_t k = 0; k < counts.size(); ++k) {
            const double p = s.p_star(k);
            ++freq_total;
            freq_bad += std::abs(counts[k] / n - p) > kSigmas * std::sqrt(p * (1.0 - p) / n);
        }
    }

    // Two-tier closed form against the general evaluator, tiers ordered so the closed form applies.
    double worst_closed = 0.0;
    int closed_cases = 0;
    for (int i = 0; i < 100; ++i) {
        auto cfg = random_config(gen, 2);
        if (cfg.tier_count() != 2) continue;
        const auto strength = [](const hcn::TierConfig& t) { return t.bias * t.power * t.path_loss.at_origin(); };
        if (strength(cfg.tiers[0]) > strength(cfg.tiers[1])) std::swap(cfg.tiers[0], cfg.tiers[1]);
        const hcn::AssociationStats s(cfg);
        if (!(s.p_star(0) > 0.0) || !(s.p_star(1) > 0.0)) continue;
        const auto closed = hcn::two_tier_pdfs(cfg);
        ++closed_cases;
        const double reach = 6.0 / std::sqrt(std::min(cfg.tiers[0].intensity, cfg.tiers[1].intensity));
        for (int j = 0; j < 1000; ++j) {
            const double u = reach * j / 999.0;
            worst_closed = std::max({worst_closed, std::abs(closed.f1(u) - s.pdf(0, u)), std::abs(closed.f2(u) - s.pdf(1, u))});
        }
    }
    info("200 random configs: max |sum p - 1| %.3g, max |mass - 1| %.3g", worst_sum, worst_mass);
    info("MC association: %d of %d tier frequencies outside 3 SE", freq_bad, freq_total);
    info("two-tier closed form: %d configs, max pointwise difference %.3g", closed_cases, worst_closed);
    verdict(5, worst_sum <= kSumTol && worst_mass <= kPdfMassTol && freq_bad == 0 && worst_closed <= kClosedFormTol,
            fmt("sum %.2g, mass %.2g, MC freq misses %d, closed form %.2g", worst_sum, worst_mass, freq_bad, worst_closed));
}

void criterion6(const std::vector<Scenario>& scenarios) {
    const auto xs = hcn::band_grid();
    int cases = 0;
    int printed_bad = 0;
    int campbell_bad = 0;
    for (const auto& sc : scenarios) {
        if (sc.kappa != 1.0) continue;
        std::vector<std::vector<double>> served(sc.cfg.tier_count());
        for (const auto& d : sc.drops) {
            if (d.tier) served[*d.tier].push_back(d.distance);
        }
        for (std::size_t k = 0; k < sc.cfg.tier_count(); ++k) {
            const double r = hcn::empirical_quantile(served[k], 0.5);
            hcn::SimSpec spec;
            spec.trials = kTrials;
            spec.seed = kSeed + 100 * sc.tiers + k;
            spec.policy = hcn::Policy::generic;
            spec.generic = {k, r, hcn::barss_exclusions(sc.cfg, k, r)};
            std::vector<double> samples;
            for (const auto& d : hcn::Simulator(sc.cfg, spec).run()) samples.push_back(d.interference);
            const double ep = hcn::band_excess(
                samples, hcn::interference_moments(sc.cfg, spec.generic.exclusions, hcn::XiVariant::printed), xs);
            const double ec = hcn::band_excess(
                samples, hcn::interference_moments(sc.cfg, spec.generic.exclusions, hcn::XiVariant::campbell), xs);
            info("%zu-tier k=%zu r=%.4f  excess printed %+.4f  campbell %+.4f", sc.tiers, k + 1, r, ep, ec);
            ++cases;
            printed_bad += ep > 0.0;
            campbell_bad += ec > 0.0;
        }
    }
    info("campbell-denominator Xi contained in %d of %d cases", cases - campbell_bad, cases);
    verdict(6, cases >= 4 && printed_bad == 0,
            fmt("printed Xi contains the empirical CDF in %d of %d (k, r) cases", cases - printed_bad, cases));
}

void criterion7(const SweepSet& s) {
    double kappa_rise = 0.0;
    for (const auto* rows : {&s.t2a3, &s.t2a4, &s.t3a3, &s.t3a4}) {
        for (std::size_t i = 1; i < rows->size(); ++i) {
            kappa_rise = std::max(kappa_rise, (*rows)[i].bounds.heuristic - (*rows)[i - 1].bounds.heuristic);
        }
    }
    double gamma_drop = 0.0;
    double env_drop = 0.0;
    double raw_drop = 0.0;
    for (std::size_t tiers : {2u, 3u}) {
        hcn::BarssOutage eval(hcn::presets::hcn_scenario(tiers, 1.0, 3.0));
        const auto gammas = hcn::presets::default_gamma_grid();
        const auto caps = eval.capacities(gammas);
        for (std::size_t i = 1; i < caps.size(); ++i) {
            gamma_drop = std::max({gamma_drop, caps[i - 1].lower - caps[i].lower, caps[i - 1].upper - caps[i].upper});
        }
        const auto taus = hcn::presets::linear_grid(0.0, 1.5 * caps.back().upper, 61);
        const auto curve = hcn::outage_curve([&](double t) { return eval.outage(t); }, taus);
        for (std::size_t i = 1; i < taus.size(); ++i) {
            env_drop = std::max({env_drop, curve.lower_envelope[i - 1] - curve.lower_envelope[i],
                                 curve.upper_envelope[i - 1] - curve.upper_envelope[i]});
            raw_drop = std::max({raw_drop, curve.raw[i - 1].lower - curve.raw[i].lower,
                                 curve.raw[i - 1].upper - curve.raw[i].upper});
        }
    }
    info("max heuristic rise along kappa %.3g; max bound drop along gamma %.3g", kappa_rise, gamma_drop);
    info("outage curves: max envelope drop %.3g, raw curve drop %.3g", env_drop, raw_drop);
    verdict(7, kappa_rise <= 0.0 && gamma_drop <= 0.0 && env_drop <= 0.0,
            fmt("kappa rise %.2g, gamma drop %.2g, tau envelope drop %.2g", kappa_rise, gamma_drop, env_drop));
}

void criterion8() {
    hcn::ValidationSpec spec;
    spec.seed = 17;
    spec.trials = 10000;
    const auto cfg = hcn::presets::three_tier(1.0);
    const auto a = hcn::run_validation(cfg, spec).to_json().dump(2);
    const auto b = hcn::run_validation(cfg, spec).to_json().dump(2);
    spec.threads = 1;
    const auto c = hcn::run_validation(cfg, spec).to_json().dump(2);
    verdict(8, a == b && a == c, fmt("validation reports identical across repeats and thread counts (%zu bytes)", a.size()));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    auto stamp = [&](const char* what) {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%7.1f s] %s\n", s, what);
        std::fflush(stdout);
    };
    try {
        stamp("kappa sweeps");
        const auto sweeps = kappa_sweeps();
        criterion1(sweeps);
        criterion2(sweeps);
        stamp("monte carlo drops");
        const auto scenarios = simulate_presets();
        criteria34(scenarios);
        stamp("association");
        criterion5(scenarios);
        stamp("gaussian band");
        criterion6(scenarios);
        stamp("monotonicity");
        criterion7(sweeps);
        stamp("determinism");
        criterion8();
        stamp("done");
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 100;
    }
    std::printf("%d criteria failed\n", failures);
    return failures;
}
