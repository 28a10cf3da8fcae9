#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hcn/association.hpp"
#include "hcn/error.hpp"
#include "hcn/interference.hpp"
#include "hcn/model.hpp"
#include "hcn/numerics.hpp"

namespace hcn {

/// A (lower, upper) pair with the midpoint used as a point estimate.
struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
    double heuristic = 0.0;

    static Bounds of(double lower, double upper) { return {lower, upper, 0.5 * (lower + upper)}; }
    double gap() const noexcept { return upper - lower; }
};

/// Capacity bracket plus the flags raised while inverting the outage curves.
struct CapacityBounds {
    double lower = 0.0;
    double upper = 0.0;
    double heuristic = 0.0;
    double ceiling = 0.0;               ///< search ceiling tau_max (nats/s/Hz)
    bool lower_at_floor = false;        ///< upper outage curve exceeds gamma right above 0
    bool upper_at_floor = false;
    bool lower_ceiling_hit = false;     ///< curve never reached gamma below the ceiling
    bool upper_ceiling_hit = false;

    double gap() const noexcept { return upper - lower; }
    bool ceiling_hit() const noexcept { return lower_ceiling_hit || upper_ceiling_hit; }
};

struct OutageOptions {
    XiVariant xi = XiVariant::printed;
    /// Outer (serving distance) integral; the fading expectation runs 10x tighter.
    QuadratureSpec outer{1e-7, 1e-8, 4000};
    QuadratureSpec inner{1e-8, 1e-9, 4000};
    int scan_points = 200;
    double capacity_tol = 1e-4;
    double ceiling_quantile = 0.9999;
};

/// Standardized interference threshold below which the link at rate tau survives.
inline double zeta(const NetworkConfig& cfg, std::size_t k, double h, double tau, double r,
                   const InterferenceMoments& moments) {
    if (!(tau >= 0.0)) {
        throw InvalidInput("target rate must be non-negative");
    }
    if (tau == 0.0) {
        return kInfinity;
    }
    const auto& tier = cfg.tiers.at(k);
    const double em1 = std::expm1(tau);
    const double signal = h * tier.path_loss(r) / em1;
    return (tier.power * (signal - cfg.snr_inverse(k)) * cfg.processing_gain - moments.mean) / moments.stddev();
}

namespace detail {

/// Points in standardized-interference space where the clamped band
/// min(1, Psi + xi c) / max(0, Psi - xi c) is not smooth: the corners of c(z)
/// and the places where either clamp engages.
inline std::vector<double> band_kinks(double xi) {
    std::vector<double> out;
    if (xi == 0.0) {
        return out;
    }
    const double corner = std::cbrt(31.935 / 0.4785 - 1.0);
    out.push_back(-corner);
    out.push_back(corner);
    auto upper_gap = [xi](double z) { return std_normal_cdf(z) + xi * berry_esseen_c(z) - 1.0; };
    auto lower_gap = [xi](double z) { return std_normal_cdf(z) - xi * berry_esseen_c(z); };
    auto add_roots = [&out](auto&& fn) {
        constexpr double lo = -40.0;
        constexpr double step = 0.25;
        double prev = fn(lo);
        for (double z = lo + step; z <= 40.0; z += step) {
            const double cur = fn(z);
            if ((prev < 0.0) != (cur < 0.0)) {
                double a = z - step;
                double b = z;
                for (int it = 0; it < 60; ++it) {
                    const double m = 0.5 * (a + b);
                    if ((fn(m) < 0.0) == (prev < 0.0)) {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                out.push_back(0.5 * (a + b));
            }
            prev = cur;
        }
    };
    add_roots(upper_gap);
    add_roots(lower_gap);
    std::sort(out.begin(), out.end());
    return out;
}

/// E[V^-] and E[V^+ - V^-] over the fading of the serving tier.
struct FadingExpectation {
    double minus = 1.0;
    double spread = 0.0;
};

inline FadingExpectation fading_expectation(const NetworkConfig& cfg, std::size_t k, double r, double tau,
                                            const InterferenceMoments& moments, std::span<const double> kinks,
                                            const QuadratureSpec& spec) {
    if (tau <= 0.0) {
        return {1.0, 0.0};
    }
    const auto& tier = cfg.tiers[k];
    const double gain = tier.path_loss(r);
    if (!(gain > 0.0)) {
        return {0.0, 0.0};
    }
    const double em1 = std::expm1(tau);
    const double snr_inv = cfg.snr_inverse(k);
    // Below h_min the useful power cannot beat the noise floor; the integrand is 0 there.
    const double h_min = snr_inv == 0.0 ? 0.0 : snr_inv * em1 / gain;
    if (h_min == kInfinity) {
        return {0.0, 0.0};
    }
    const double slope = std::isfinite(em1) ? tier.power * gain * cfg.processing_gain / em1 : 0.0;
    const double offset = tier.power * snr_inv * cfg.processing_gain + moments.mean;
    const double sd = moments.stddev();
    const double xi = moments.xi;
    const auto& fading = tier.fading;

    auto band = [&](double h, double& lo, double& hi) {
        const double z = (slope * h - offset) / sd;
        const double psi = std_normal_cdf(z);
        const double slack = xi * berry_esseen_c(z);
        lo = std::max(0.0, psi - slack);
        hi = std::min(1.0, psi + slack);
    };
    auto minus = [&](double h) {
        double lo, hi;
        band(h, lo, hi);
        return lo * fading.density(h);
    };
    auto spread = [&](double h) {
        double lo, hi;
        band(h, lo, hi);
        return (hi - lo) * fading.density(h);
    };

    // Split the h axis where the band has corners so every piece is smooth.
    std::vector<double> cuts{h_min};
    if (slope > 0.0) {
        for (double z : kinks) {
            const double h = (z * sd + offset) / slope;
            if (h > cuts.back()) {
                cuts.push_back(h);
            }
        }
    }
    CompensatedSum minus_sum;
    CompensatedSum spread_sum;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (i + 1 < cuts.size()) {
            minus_sum += integrate_finite(minus, cuts[i], cuts[i + 1], spec).value;
            if (xi != 0.0) spread_sum += integrate_finite(spread, cuts[i], cuts[i + 1], spec).value;
        } else {
            minus_sum += integrate_semi_infinite(minus, cuts[i], spec).value;
            if (xi != 0.0) spread_sum += integrate_semi_infinite(spread, cuts[i], spec).value;
        }
    }
    return {minus_sum.value(), spread_sum.value()};
}

inline Bounds outage_from_expectation(double minus, double spread) {
    const double upper = std::clamp(1.0 - minus, 0.0, 1.0);
    const double lower = std::clamp(1.0 - minus - std::max(0.0, spread), 0.0, upper);
    return Bounds::of(lower, upper);
}

/// tau_max = log(1 + P_max G_max(0) PG h_q / max(mean, eps)).
inline double capacity_ceiling(const NetworkConfig& cfg, double interference_mean, double quantile) {
    double peak = 0.0;
    double hq = 0.0;
    for (const auto& t : cfg.tiers) {
        peak = std::max(peak, t.power * t.path_loss.at_origin());
        hq = std::max(hq, t.fading.quantile(quantile));
    }
    return std::log1p(peak * cfg.processing_gain * hq / std::max(interference_mean, 1e-12));
}

}  // namespace detail

/// Raw bound curves on a tau grid plus their monotone envelopes: the upper
/// curve takes a running max from the left, the lower a running min from the right.
struct OutageCurve {
    std::vector<double> tau;
    std::vector<Bounds> raw;
    std::vector<double> lower_envelope;
    std::vector<double> upper_envelope;
};

template <class Curve>
OutageCurve outage_curve(Curve&& curve, std::span<const double> taus) {
    for (std::size_t i = 1; i < taus.size(); ++i) {
        if (!(taus[i] > taus[i - 1])) {
            throw InvalidInput("tau grid must be strictly increasing");
        }
    }
    OutageCurve out;
    out.tau.assign(taus.begin(), taus.end());
    for (double t : taus) {
        out.raw.push_back(curve(t));
        out.lower_envelope.push_back(out.raw.back().lower);
        out.upper_envelope.push_back(out.raw.back().upper);
    }
    auto& up = out.upper_envelope;
    auto& lo = out.lower_envelope;
    for (std::size_t i = 1; i < up.size(); ++i) {
        up[i] = std::max(up[i], up[i - 1]);
    }
    for (std::size_t i = lo.size(); i-- > 1;) {
        lo[i - 1] = std::min(lo[i - 1], lo[i]);
    }
    return out;
}

namespace detail {

/// Inverts a pair of outage curves at each gamma: a 200-point scan on
/// [0, ceiling] with monotone envelopes brackets each crossing, then bisection
/// on the raw curve refines it.
template <class Curve>
std::vector<CapacityBounds> invert_outage_curves(Curve&& curve, std::span<const double> gammas, double ceiling,
                                                 const OutageOptions& opts) {
    for (double g : gammas) {
        if (!(g > 0.0 && g < 1.0)) {
            throw InvalidInput("target outage probability must lie in (0, 1)");
        }
    }
    const int n = std::max(opts.scan_points, 2);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = ceiling * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    const OutageCurve scan = outage_curve(curve, grid);
    const auto& taus = scan.tau;

    auto solve = [&](const std::vector<double>& env, double gamma, bool use_upper, bool& at_floor,
                     bool& ceiling_hit) {
        const auto first_above = std::upper_bound(env.begin(), env.end(), gamma);
        if (first_above == env.end()) {
            ceiling_hit = true;
            return ceiling;
        }
        if (first_above == env.begin()) {
            at_floor = true;
            return 0.0;
        }
        const auto i = static_cast<std::size_t>(first_above - env.begin());
        auto raw = [&](double tau) {
            const Bounds b = curve(tau);
            return use_upper ? b.upper : b.lower;
        };
        const auto res = bisect_monotone(raw, gamma, taus[i - 1], taus[i], opts.capacity_tol);
        if (res.degenerate_at_floor || (i == 1 && res.x <= opts.capacity_tol)) {
            at_floor = true;
        }
        return res.x;
    };

    std::vector<CapacityBounds> out;
    out.reserve(gammas.size());
    for (double gamma : gammas) {
        CapacityBounds c;
        c.ceiling = ceiling;
        // The upper outage curve bounds capacity from below and vice versa.
        c.lower = solve(scan.upper_envelope, gamma, true, c.lower_at_floor, c.lower_ceiling_hit);
        c.upper = solve(scan.lower_envelope, gamma, false, c.upper_at_floor, c.upper_ceiling_hit);
        c.heuristic = 0.5 * (c.lower + c.upper);
        out.push_back(c);
    }
    return out;
}

}  // namespace detail

/// Outage bounds for a user served by tier k at distance r while interferers
/// form PPPs outside the given exclusion discs (generic association policy).
class ConditionalOutage {
public:
    ConditionalOutage(const NetworkConfig& cfg, std::size_t k, double r, ExclusionVector exclusions,
                      OutageOptions opts = {})
        : cfg_(cfg), k_(k), r_(r), exclusions_(std::move(exclusions)), opts_(opts) {
        if (k_ >= cfg_.tier_count()) {
            throw InvalidInput("serving tier index out of range");
        }
        moments_ = interference_moments(cfg_, exclusions_, opts_.xi);
        kinks_ = detail::band_kinks(moments_.xi);
    }

    /// Exclusions implied by biased received-signal-strength association.
    ConditionalOutage(const NetworkConfig& cfg, std::size_t k, double r, OutageOptions opts = {})
        : ConditionalOutage(cfg, k, r, barss_exclusions(cfg, k, r), opts) {}

    const InterferenceMoments& moments() const noexcept { return moments_; }

    Bounds outage(double tau) const {
        if (!(tau >= 0.0)) {
            throw InvalidInput("target rate must be non-negative");
        }
        const auto e = detail::fading_expectation(cfg_, k_, r_, tau, moments_, kinks_, opts_.inner);
        return detail::outage_from_expectation(e.minus, e.spread);
    }

    double ceiling() const { return detail::capacity_ceiling(cfg_, moments_.mean, opts_.ceiling_quantile); }

    CapacityBounds capacity(double gamma) const { return capacities(std::span<const double>(&gamma, 1)).front(); }

    std::vector<CapacityBounds> capacities(std::span<const double> gammas) const {
        return detail::invert_outage_curves([this](double tau) { return outage(tau); }, gammas, ceiling(), opts_);
    }

private:
    NetworkConfig cfg_;
    std::size_t k_;
    double r_;
    ExclusionVector exclusions_;
    OutageOptions opts_;
    InterferenceMoments moments_;
    std::vector<double> kinks_;
};

inline Bounds conditional_outage_bounds(const NetworkConfig& cfg, std::size_t k, double r, double tau,
                                        const OutageOptions& opts = {}) {
    return ConditionalOutage(cfg, k, r, opts).outage(tau);
}

inline Bounds conditional_outage_bounds(const NetworkConfig& cfg, std::size_t k, double r,
                                        const ExclusionVector& exclusions, double tau,
                                        const OutageOptions& opts = {}) {
    return ConditionalOutage(cfg, k, r, exclusions, opts).outage(tau);
}

inline CapacityBounds conditional_capacity_bounds(const NetworkConfig& cfg, std::size_t k, double r, double gamma,
                                                  const OutageOptions& opts = {}) {
    return ConditionalOutage(cfg, k, r, opts).capacity(gamma);
}

inline CapacityBounds conditional_capacity_bounds(const NetworkConfig& cfg, std::size_t k, double r,
                                                  const ExclusionVector& exclusions, double gamma,
                                                  const OutageOptions& opts = {}) {
    return ConditionalOutage(cfg, k, r, exclusions, opts).capacity(gamma);
}

/// Outage bounds averaged over the association statistics of biased
/// received-signal-strength association.
///
/// Interference moments and association densities are memoised per (tier, r)
/// node so that sweeping tau reuses them; an instance is therefore not safe
/// to share between threads. Give each worker its own evaluator.
class BarssOutage {
public:
    explicit BarssOutage(const NetworkConfig& cfg, OutageOptions opts = {})
        : cfg_(cfg), opts_(opts), assoc_(cfg_), nodes_(cfg_.tier_count()) {
        const ExclusionVector none(cfg_.tier_count(), 0.0);
        ceiling_ = detail::capacity_ceiling(cfg_, interference_moments(cfg_, none, opts_.xi).mean,
                                            opts_.ceiling_quantile);
    }

    const AssociationStats& association() const noexcept { return assoc_; }
    const NetworkConfig& config() const noexcept { return cfg_; }
    double ceiling() const noexcept { return ceiling_; }

    /// Interference moments conditioned on service from tier k at distance r.
    const InterferenceMoments& conditional_moments(std::size_t k, double r) { return node(k, r).moments; }

    Bounds outage(double tau) {
        if (!(tau >= 0.0)) {
            throw InvalidInput("target rate must be non-negative");
        }
        if (tau == 0.0) {
            return Bounds::of(0.0, 0.0);
        }
        CompensatedSum minus;
        CompensatedSum spread;
        for (std::size_t k = 0; k < cfg_.tier_count(); ++k) {
            if (!(assoc_.p_star(k) > 0.0)) {
                continue;
            }
            std::unordered_map<double, detail::FadingExpectation> inner;
            auto expect = [&](double r) -> const detail::FadingExpectation& {
                auto it = inner.find(r);
                if (it == inner.end()) {
                    const Node& n = node(k, r);
                    it = inner.emplace(r, detail::fading_expectation(cfg_, k, r, tau, n.moments, n.kinks, opts_.inner))
                             .first;
                }
                return it->second;
            };
            const auto& table = assoc_.table(k);
            auto integrand = [&](double r, bool want_spread) {
                const double w = node(k, r).weight;
                if (!(w > 0.0)) {
                    return 0.0;
                }
                const auto& e = expect(r);
                return w * (want_spread ? e.spread : e.minus);
            };
            minus += detail::integrate_over_segments(
                table, [&](double r) { return integrand(r, false); }, opts_.outer);
            spread += detail::integrate_over_segments(
                table, [&](double r) { return integrand(r, true); }, opts_.outer);
        }
        return detail::outage_from_expectation(minus.value(), spread.value());
    }

    CapacityBounds capacity(double gamma) { return capacities(std::span<const double>(&gamma, 1)).front(); }

    std::vector<CapacityBounds> capacities(std::span<const double> gammas) {
        return detail::invert_outage_curves([this](double tau) { return outage(tau); }, gammas, ceiling_, opts_);
    }

private:
    struct Node {
        double weight;  // p_k f_k(r)
        InterferenceMoments moments;
        std::vector<double> kinks;
    };

    const Node& node(std::size_t k, double r) {
        auto& cache = nodes_[k];
        auto it = cache.find(r);
        if (it == cache.end()) {
            Node n{assoc_.joint_density(k, r), {}, {}};
            // Far tails carry no probability mass; skip their (possibly underflowing) moments.
            if (n.weight > 0.0) {
                n.moments = interference_moments(cfg_, barss_exclusions(cfg_, k, r), opts_.xi);
                n.kinks = detail::band_kinks(n.moments.xi);
            }
            it = cache.emplace(r, n).first;
        }
        return it->second;
    }

    NetworkConfig cfg_;
    OutageOptions opts_;
    AssociationStats assoc_;
    std::vector<std::unordered_map<double, Node>> nodes_;
    double ceiling_ = 0.0;
};

inline Bounds barss_outage_bounds(const NetworkConfig& cfg, double tau, const OutageOptions& opts = {}) {
    return BarssOutage(cfg, opts).outage(tau);
}

inline CapacityBounds barss_capacity_bounds(const NetworkConfig& cfg, double gamma, const OutageOptions& opts = {}) {
    return BarssOutage(cfg, opts).capacity(gamma);
}

}  // namespace hcn
