#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "hcn/error.hpp"
#include "hcn/interference.hpp"
#include "hcn/model.hpp"
#include "hcn/numerics.hpp"
#include "hcn/rng.hpp"

namespace hcn {

enum class Policy { barss, generic };

/// Fixed serving link plus interferer exclusion discs for generic-policy drops.
struct GenericAssignment {
    std::size_t tier = 0;
    double distance = 0.0;
    ExclusionVector exclusions;
};

struct SimSpec {
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    Policy policy = Policy::barss;
    GenericAssignment generic;
    /// Radius of the simulated disc; 0 selects it from tail_variance_fraction.
    double window_radius = 0.0;
    /// Interferers beyond the window are replaced by a Gaussian with their
    /// exact (Campbell) mean and variance. Off means plain truncation.
    bool tail_compensation = true;
    /// Automatic window: smallest radius whose tail holds at most this fraction
    /// of the interference variance.
    double tail_variance_fraction = 1e-4;
    /// Worker threads; 0 uses the hardware concurrency. Results do not depend on it.
    unsigned threads = 0;
};

struct DropResult {
    std::optional<std::size_t> tier;  ///< serving tier, empty when the window held no BS
    double distance = 0.0;
    double fading = 0.0;
    double interference = 0.0;
    double sinr = 0.0;
    double rate = 0.0;  ///< log(1 + SINR), nats/s/Hz

    bool empty_window() const noexcept { return !tier.has_value(); }
};

struct Point {
    double x;
    double y;
};

/// Homogeneous PPP of the given intensity on the disc of radius `radius`.
inline std::vector<Point> sample_ppp(double intensity, double radius, CounterRng& rng) {
    if (!(intensity > 0.0) || !(radius > 0.0)) {
        throw InvalidInput("sample_ppp needs positive intensity and radius");
    }
    std::poisson_distribution<long long> count(intensity * std::numbers::pi * radius * radius);
    const auto n = count(rng);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const double rho = radius * std::sqrt(rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        pts.push_back({rho * std::cos(theta), rho * std::sin(theta)});
    }
    return pts;
}

/// Smallest radius R with sum_i lambda_i P_i^2 m2_i int_{max(R, d_i)}^inf G_i^2 t dt at most
/// `fraction` of the same sum taken from d_i.
inline double default_window_radius(const NetworkConfig& cfg, std::span<const double> exclusions,
                                    double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InvalidInput("tail variance fraction must lie in (0, 1)");
    }
    auto tail = [&](double radius) {
        CompensatedSum s;
        for (std::size_t i = 0; i < cfg.tier_count(); ++i) {
            const auto& t = cfg.tiers[i];
            const double from = std::max(radius, exclusions[i]);
            s += t.intensity * t.power * t.power * t.fading.moments().second *
                 shot_noise_integral(t.path_loss, 2, from);
        }
        return s.value();
    };
    const double total = tail(0.0);
    if (!(total > 0.0)) {
        return 1.0;  // nothing to simulate beyond the exclusions
    }
    double lo = 0.0;
    double hi = 1.0;
    for (double d : exclusions) {
        if (std::isfinite(d)) hi = std::max(hi, d);
    }
    while (tail(hi) > fraction * total) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > fraction * total ? lo : hi) = mid;
    }
    return hi;
}

/// Brute-force downlink simulator. Each trial draws its own PPPs and fading
/// from counter-based substreams keyed by (seed, trial, tier, purpose), so
/// results are reproducible under any thread count.
class Simulator {
public:
    Simulator(const NetworkConfig& cfg, const SimSpec& spec) : cfg_(cfg), spec_(spec) {
        const std::size_t k = cfg_.tier_count();
        if (spec_.trials < 1) {
            throw InvalidInput("at least one trial is required");
        }
        if (spec_.policy == Policy::generic) {
            const auto& g = spec_.generic;
            if (g.tier >= k || g.exclusions.size() != k || !(g.distance >= 0.0)) {
                throw InvalidInput("generic assignment does not match the network");
            }
            exclusions_ = g.exclusions;
        } else {
            exclusions_.assign(k, 0.0);
        }
        window_ = spec_.window_radius > 0.0 ? spec_.window_radius
                                            : default_window_radius(cfg_, exclusions_, spec_.tail_variance_fraction);
        if (spec_.tail_compensation) {
            constexpr double two_pi = 2.0 * std::numbers::pi;
            CompensatedSum mean;
            CompensatedSum var;
            for (std::size_t i = 0; i < k; ++i) {
                const auto& t = cfg_.tiers[i];
                const double from = std::max(window_, exclusions_[i]);
                mean += two_pi * t.intensity * t.power * t.fading.moments().mean * shot_noise_integral(t.path_loss, 1, from);
                var += two_pi * t.intensity * t.power * t.power * t.fading.moments().second *
                       shot_noise_integral(t.path_loss, 2, from);
            }
            tail_mean_ = mean.value();
            tail_sd_ = std::sqrt(var.value());
        }
    }

    double window_radius() const noexcept { return window_; }
    double tail_mean() const noexcept { return tail_mean_; }
    const NetworkConfig& config() const noexcept { return cfg_; }
    const SimSpec& spec() const noexcept { return spec_; }

    DropResult drop(std::uint64_t trial) const {
        return spec_.policy == Policy::barss ? barss_drop(trial) : generic_drop(trial);
    }

    std::vector<DropResult> run() const {
        std::vector<DropResult> out(spec_.trials);
        unsigned workers = spec_.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec_.threads;
        workers = static_cast<unsigned>(std::min<std::size_t>(workers, out.size()));
        if (workers <= 1) {
            for (std::size_t t = 0; t < out.size(); ++t) out[t] = drop(t);
            return out;
        }
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < out.size(); t += workers) out[t] = drop(t);
            });
        }
        return out;
    }

private:
    double tail_sample(std::uint64_t trial) const {
        if (!spec_.tail_compensation || !(tail_sd_ > 0.0)) {
            return spec_.tail_compensation ? tail_mean_ : 0.0;
        }
        CounterRng rng(spec_.seed, trial, 0, StreamPurpose::tail);
        std::normal_distribution<double> normal(tail_mean_, tail_sd_);
        return std::max(0.0, normal(rng));
    }

    DropResult finish(DropResult d) const {
        const auto& t = cfg_.tiers[*d.tier];
        const double signal = t.power * d.fading * t.path_loss(d.distance);
        const double denom = cfg_.noise + d.interference / cfg_.processing_gain;
        d.sinr = denom > 0.0 ? signal / denom : kInfinity;
        d.rate = std::log1p(d.sinr);
        return d;
    }

    // Serving BS = argmax of beta P G(|x|) over every point; ties go to the lower tier.
    DropResult barss_drop(std::uint64_t trial) const {
        const double area = std::numbers::pi * window_ * window_;
        CompensatedSum total;
        double best_score = -1.0;
        double best_power = 0.0;
        DropResult d;
        for (std::size_t i = 0; i < cfg_.tier_count(); ++i) {
            const auto& t = cfg_.tiers[i];
            CounterRng pos(spec_.seed, trial, i, StreamPurpose::points);
            CounterRng fade(spec_.seed, trial, i, StreamPurpose::fading);
            std::poisson_distribution<long long> count(t.intensity * area);
            const long long n = count(pos);
            for (long long j = 0; j < n; ++j) {
                const double dist = window_ * std::sqrt(pos.uniform());
                const double h = t.fading.sample(fade);
                const double g = t.path_loss(dist);
                const double received = t.power * h * g;
                total += received;
                const double score = t.bias * t.power * g;
                if (score > best_score) {
                    best_score = score;
                    best_power = received;
                    d.tier = i;
                    d.distance = dist;
                    d.fading = h;
                }
            }
        }
        if (!d.tier) {
            return d;  // empty window: counted as outage at every rate
        }
        total += -best_power;
        d.interference = std::max(0.0, total.value()) + tail_sample(trial);
        return finish(d);
    }

    DropResult generic_drop(std::uint64_t trial) const {
        const auto& g = spec_.generic;
        CompensatedSum total;
        for (std::size_t i = 0; i < cfg_.tier_count(); ++i) {
            const double inner = exclusions_[i];
            if (inner == kInfinity || inner >= window_) {
                continue;
            }
            const auto& t = cfg_.tiers[i];
            CounterRng pos(spec_.seed, trial, i, StreamPurpose::points);
            CounterRng fade(spec_.seed, trial, i, StreamPurpose::fading);
            const double r2_in = inner * inner;
            const double r2_out = window_ * window_;
            std::poisson_distribution<long long> count(t.intensity * std::numbers::pi * (r2_out - r2_in));
            const long long n = count(pos);
            for (long long j = 0; j < n; ++j) {
                const double dist = std::sqrt(r2_in + (r2_out - r2_in) * pos.uniform());
                total += t.power * t.fading.sample(fade) * t.path_loss(dist);
            }
        }
        DropResult d;
        d.tier = g.tier;
        d.distance = g.distance;
        CounterRng serving(spec_.seed, trial, g.tier, StreamPurpose::serving);
        d.fading = cfg_.tiers[g.tier].fading.sample(serving);
        d.interference = total.value() + tail_sample(trial);
        return finish(d);
    }

    NetworkConfig cfg_;
    SimSpec spec_;
    ExclusionVector exclusions_;
    double window_ = 0.0;
    double tail_mean_ = 0.0;
    double tail_sd_ = 0.0;
};

inline DropResult drop(const NetworkConfig& cfg, const SimSpec& spec, std::uint64_t trial) {
    return Simulator(cfg, spec).drop(trial);
}

/// A Monte Carlo estimate with its error measure.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Fraction of drops with rate below tau (empty windows count as outage) and
/// its binomial standard error.
inline Estimate empirical_outage(std::span<const DropResult> drops, double tau) {
    if (drops.empty()) {
        throw InvalidInput("empirical_outage needs at least one drop");
    }
    std::size_t outages = 0;
    for (const auto& d : drops) {
        if (d.empty_window() || d.rate < tau) ++outages;
    }
    const double n = static_cast<double>(drops.size());
    const double p = static_cast<double>(outages) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

inline Estimate empirical_outage(const NetworkConfig& cfg, const SimSpec& spec, double tau) {
    if (spec.trials < 100) {
        throw InvalidInput("empirical_outage needs at least 100 trials");
    }
    const auto drops = Simulator(cfg, spec).run();
    return empirical_outage(drops, tau);
}

/// sup{tau : fraction(rate < tau) <= gamma}, i.e. the (floor(gamma n) + 1)-th
/// order statistic of the rates. The error is the larger distance to the order
/// statistics three binomial standard deviations away.
inline Estimate empirical_capacity(std::span<const double> rates, double gamma) {
    if (rates.empty()) {
        throw InvalidInput("empirical_capacity needs samples");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw InvalidInput("target outage probability must lie in (0, 1)");
    }
    std::vector<double> sorted(rates.begin(), rates.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    auto at = [&](double rank) {  // zero-based, clamped
        const auto i = static_cast<std::size_t>(std::clamp(rank, 0.0, n - 1.0));
        return sorted[i];
    };
    const double rank = std::floor(gamma * n);
    const double spread = 3.0 * std::sqrt(n * gamma * (1.0 - gamma));
    const double value = at(rank);
    const double error = std::max(value - at(std::floor(rank - spread)), at(std::ceil(rank + spread)) - value);
    return {value, error};
}

inline Estimate empirical_capacity(std::span<const DropResult> drops, double gamma) {
    std::vector<double> rates;
    rates.reserve(drops.size());
    for (const auto& d : drops) rates.push_back(d.empty_window() ? 0.0 : d.rate);
    return empirical_capacity(rates, gamma);
}

inline Estimate empirical_capacity(const NetworkConfig& cfg, const SimSpec& spec, double gamma) {
    if (spec.trials < 1000) {
        throw InvalidInput("empirical_capacity needs at least 1000 trials");
    }
    const auto drops = Simulator(cfg, spec).run();
    return empirical_capacity(drops, gamma);
}

/// Raw drop dump: trial,tier,distance,fading,interference,sinr,rate (tier 1-based, 0 = empty window).
inline void write_drops_csv(std::ostream& os, std::span<const DropResult> drops) {
    os << "trial,tier,distance,fading,interference,sinr,rate\n";
    char buf[256];
    for (std::size_t t = 0; t < drops.size(); ++t) {
        const auto& d = drops[t];
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17e,%.17e,%.17e,%.17e,%.17e\n", t, d.tier ? *d.tier + 1 : 0,
                      d.distance, d.fading, d.interference, d.sinr, d.rate);
        os << buf;
    }
}

}  // namespace hcn
