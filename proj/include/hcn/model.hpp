#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "hcn/error.hpp"
#include "hcn/numerics.hpp"
#include "hcn/rng.hpp"

namespace hcn {

// ---------------------------------------------------------------------------
// Path loss
// ---------------------------------------------------------------------------

enum class PathLossFamily {
    bounded_power,  ///< G(t) = 1 / (1 + t^alpha)
    capped_power,   ///< G(t) = min(1, t^-alpha)
    custom,         ///< user supplied, inverted by bisection
};

/// Bounded, continuous, non-increasing attenuation G: [0, inf) -> [0, inf).
class PathLossModel {
public:
    using Gain = std::function<double(double)>;

    static PathLossModel bounded_power(double alpha) {
        return PathLossModel(PathLossFamily::bounded_power, alpha, {});
    }
    static PathLossModel capped_power(double alpha) {
        return PathLossModel(PathLossFamily::capped_power, alpha, {});
    }
    /// `alpha` is the declared asymptotic decay exponent of `gain`.
    static PathLossModel custom(double alpha, Gain gain) {
        if (!gain) {
            throw InvalidInput("custom path loss needs a gain function");
        }
        return PathLossModel(PathLossFamily::custom, alpha, std::move(gain));
    }

    PathLossFamily family() const noexcept { return family_; }
    double alpha() const noexcept { return alpha_; }
    double at_origin() const noexcept { return origin_gain_; }

    double operator()(double t) const {
        switch (family_) {
            case PathLossFamily::bounded_power:
                return 1.0 / (1.0 + power(t));
            case PathLossFamily::capped_power:
                return t <= 1.0 ? 1.0 : 1.0 / power(t);
            case PathLossFamily::custom:
                break;
        }
        return gain_(t);
    }

    /// Generalized inverse inf{x >= 0 : G(x) = y}; 0 above G(0), +inf at y = 0.
    double inverse(double y) const {
        if (std::isnan(y) || y < 0.0) {
            throw InvalidInput("path loss inverse needs a non-negative gain");
        }
        if (y == 0.0) {
            return kInfinity;
        }
        if (y >= origin_gain_) {
            return 0.0;
        }
        switch (family_) {
            case PathLossFamily::bounded_power:
                return std::pow((1.0 - y) / y, 1.0 / alpha_);
            case PathLossFamily::capped_power:
                return std::pow(y, -1.0 / alpha_);
            case PathLossFamily::custom:
                break;
        }
        return bisect_inverse(y);
    }

private:
    PathLossModel(PathLossFamily family, double alpha, Gain gain)
        : family_(family), alpha_(alpha), gain_(std::move(gain)) {
        origin_gain_ = (*this)(0.0);
        integer_alpha_ = alpha_ == 2.0 || alpha_ == 3.0 || alpha_ == 4.0;
    }

    double power(double t) const {
        if (integer_alpha_) {
            const double t2 = t * t;
            if (alpha_ == 2.0) return t2;
            if (alpha_ == 3.0) return t2 * t;
            return t2 * t2;
        }
        return std::pow(t, alpha_);
    }

    // G is continuous and non-increasing, so inf{x : G(x) = y} = inf{x : G(x) <= y}.
    double bisect_inverse(double y) const {
        double lo = 0.0;
        double hi = 1.0;
        while ((*this)(hi) > y) {
            lo = hi;
            hi *= 2.0;
            if (!std::isfinite(hi)) {
                return kInfinity;
            }
        }
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            if ((*this)(mid) <= y) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi;
    }

    PathLossFamily family_;
    double alpha_;
    Gain gain_;
    double origin_gain_ = 0.0;
    bool integer_alpha_ = false;
};

inline double path_loss_inverse(const PathLossModel& model, double y) { return model.inverse(y); }

// ---------------------------------------------------------------------------
// Fading
// ---------------------------------------------------------------------------

/// First three raw moments of the fading power gain.
struct FadingMoments {
    double mean = 1.0;
    double second = 1.0;
    double third = 1.0;

    /// j-th raw moment, j in {1, 2, 3}.
    double raw(int j) const {
        switch (j) {
            case 1: return mean;
            case 2: return second;
            case 3: return third;
            default: throw InvalidInput("only the first three fading moments are tracked");
        }
    }
};

/// Moments of a Gamma(m, 1/m) power gain (Nakagami-m amplitude, unit mean power).
inline FadingMoments nakagami_moments(double m) {
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw InvalidInput("Nakagami shape parameter must be positive");
    }
    return {1.0, (m + 1.0) / m, (m + 1.0) * (m + 2.0) / (m * m)};
}

enum class FadingFamily { nakagami, rayleigh, custom };

class FadingModel {
public:
    using Density = std::function<double(double)>;
    using Sampler = std::function<double(CounterRng&)>;

    static FadingModel nakagami(double m) {
        FadingModel f(FadingFamily::nakagami, nakagami_moments(m));
        f.shape_ = m;
        f.log_normalizer_ = m * std::log(m) - std::lgamma(m);
        return f;
    }
    /// Exponential power gain with unit mean.
    static FadingModel rayleigh() {
        FadingModel f(FadingFamily::rayleigh, nakagami_moments(1.0));
        f.shape_ = 1.0;
        f.log_normalizer_ = 0.0;
        return f;
    }
    /// Arbitrary fading given as (density, moments, sampler). Consistency of the
    /// triple is checked by validate_network.
    static FadingModel custom(Density density, FadingMoments moments, Sampler sampler) {
        if (!density || !sampler) {
            throw InvalidInput("custom fading needs both a density and a sampler");
        }
        FadingModel f(FadingFamily::custom, moments);
        f.density_ = std::move(density);
        f.sampler_ = std::move(sampler);
        return f;
    }

    FadingFamily family() const noexcept { return family_; }
    /// Gamma shape m (1 for Rayleigh); NaN for custom models.
    double shape() const noexcept { return shape_; }
    const FadingMoments& moments() const noexcept { return moments_; }

    double density(double h) const {
        if (h < 0.0) {
            return 0.0;
        }
        if (family_ == FadingFamily::custom) {
            return density_(h);
        }
        const double m = shape_;
        if (h == 0.0) {
            return m < 1.0 ? kInfinity : (m == 1.0 ? 1.0 : 0.0);
        }
        return std::exp(log_normalizer_ + (m - 1.0) * std::log(h) - m * h);
    }

    double cdf(double h) const {
        if (h <= 0.0) {
            return 0.0;
        }
        if (family_ == FadingFamily::custom) {
            const auto res = integrate_finite(density_, 0.0, h, {1e-10, 1e-13, 2000});
            return std::clamp(res.value, 0.0, 1.0);
        }
        if (!std::isfinite(h)) {
            return 1.0;
        }
        return boost::math::gamma_p(shape_, shape_ * h);
    }

    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) {
            throw InvalidInput("fading quantile requires 0 < p < 1");
        }
        if (family_ != FadingFamily::custom) {
            return boost::math::gamma_p_inv(shape_, p) / shape_;
        }
        double hi = std::max(1.0, moments_.mean);
        while (cdf(hi) < p) {
            hi *= 2.0;
        }
        auto res = bisect_monotone([this](double h) { return cdf(h); }, p, 0.0, hi, 1e-10 * hi);
        return res.x;
    }

    double sample(CounterRng& rng) const {
        if (family_ == FadingFamily::custom) {
            return sampler_(rng);
        }
        std::gamma_distribution<double> gamma(shape_, 1.0 / shape_);
        return gamma(rng);
    }

private:
    FadingModel(FadingFamily family, FadingMoments moments) : family_(family), moments_(moments) {}

    FadingFamily family_;
    FadingMoments moments_;
    double shape_ = std::numeric_limits<double>::quiet_NaN();
    double log_normalizer_ = 0.0;  // m log m - lgamma(m)
    Density density_;
    Sampler sampler_;
};

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

struct TierConfig {
    double power;      ///< transmit power P_k (W)
    double intensity;  ///< BS density lambda_k (per unit area)
    double bias;       ///< association bias beta_k
    PathLossModel path_loss;
    FadingModel fading;
};

struct NetworkConfig {
    std::vector<TierConfig> tiers;
    double noise = 0.0;            ///< N0 (W); zero means interference limited
    double processing_gain = 1.0;  ///< PG >= 1

    std::size_t tier_count() const noexcept { return tiers.size(); }

    /// 1 / SNR_k = N0 / P_k, exactly 0 when N0 = 0.
    double snr_inverse(std::size_t k) const { return noise == 0.0 ? 0.0 : noise / tiers.at(k).power; }

    /// Copy with every intensity multiplied by `factor`.
    NetworkConfig scaled_intensities(double factor) const {
        NetworkConfig out = *this;
        for (auto& t : out.tiers) {
            t.intensity *= factor;
        }
        return out;
    }
};

enum class ValidationFailure {
    no_tiers,
    nonpositive_power,
    nonpositive_intensity,
    nonpositive_bias,
    negative_noise,
    processing_gain_below_one,
    path_loss_exponent_too_small,
    path_loss_unbounded,
    path_loss_increasing,
    path_loss_decay_too_slow,
    fading_moments_invalid,
    fading_density_not_normalized,
    fading_moments_inconsistent,
};

inline const char* to_string(ValidationFailure f) noexcept {
    switch (f) {
        case ValidationFailure::no_tiers: return "no_tiers";
        case ValidationFailure::nonpositive_power: return "nonpositive_power";
        case ValidationFailure::nonpositive_intensity: return "nonpositive_intensity";
        case ValidationFailure::nonpositive_bias: return "nonpositive_bias";
        case ValidationFailure::negative_noise: return "negative_noise";
        case ValidationFailure::processing_gain_below_one: return "processing_gain_below_one";
        case ValidationFailure::path_loss_exponent_too_small: return "path_loss_exponent_too_small";
        case ValidationFailure::path_loss_unbounded: return "path_loss_unbounded";
        case ValidationFailure::path_loss_increasing: return "path_loss_increasing";
        case ValidationFailure::path_loss_decay_too_slow: return "path_loss_decay_too_slow";
        case ValidationFailure::fading_moments_invalid: return "fading_moments_invalid";
        case ValidationFailure::fading_density_not_normalized: return "fading_density_not_normalized";
        case ValidationFailure::fading_moments_inconsistent: return "fading_moments_inconsistent";
    }
    return "unknown";
}

class ValidationError : public Error {
public:
    ValidationError(ValidationFailure failure, std::optional<std::size_t> tier, const std::string& detail)
        : Error(message(failure, tier, detail)), failure_(failure), tier_(tier) {}

    ValidationFailure failure() const noexcept { return failure_; }
    /// Zero-based index of the offending tier, if the failure is tier specific.
    std::optional<std::size_t> tier() const noexcept { return tier_; }

private:
    static std::string message(ValidationFailure f, std::optional<std::size_t> tier, const std::string& detail) {
        std::string s = "invalid network: ";
        s += to_string(f);
        if (tier) {
            s += " (tier " + std::to_string(*tier + 1) + ")";
        }
        if (!detail.empty()) {
            s += ": " + detail;
        }
        return s;
    }

    ValidationFailure failure_;
    std::optional<std::size_t> tier_;
};

namespace detail {

inline void validate_path_loss(const PathLossModel& g, std::size_t tier) {
    auto fail = [tier](ValidationFailure f, const std::string& d) { throw ValidationError(f, tier, d); };
    if (!(g.alpha() > 2.0) || !std::isfinite(g.alpha())) {
        fail(ValidationFailure::path_loss_exponent_too_small, "decay exponent must exceed 2");
    }
    const double g0 = g.at_origin();
    if (!std::isfinite(g0) || !(g0 > 0.0)) {
        fail(ValidationFailure::path_loss_unbounded, "G(0) must be finite and positive");
    }
    if (g.family() != PathLossFamily::custom) {
        return;
    }
    // Sampled monotonicity on a geometric grid.
    double prev = g0;
    for (double t = 1e-4; t <= 1e6; t *= 1.1) {
        const double v = g(t);
        if (!(v >= 0.0) || v > prev * (1.0 + 1e-12)) {
            fail(ValidationFailure::path_loss_increasing, "G must be non-negative and non-increasing");
        }
        prev = v;
    }
    // G(t) t^alpha must stay bounded: compare its far value against the mid range.
    double mid = 0.0;
    for (double t = 10.0; t <= 1e3; t *= 10.0) {
        mid = std::max(mid, g(t) * std::pow(t, g.alpha()));
    }
    const double far = g(1e6) * std::pow(1e6, g.alpha());
    if (far > 10.0 * std::max(mid, g0)) {
        fail(ValidationFailure::path_loss_decay_too_slow, "G(t) t^alpha grows with t");
    }
}

inline void validate_fading(const FadingModel& f, std::size_t tier) {
    auto fail = [tier](ValidationFailure v, const std::string& d) { throw ValidationError(v, tier, d); };
    const auto& m = f.moments();
    for (double v : {m.mean, m.second, m.third}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            fail(ValidationFailure::fading_moments_invalid, "moments must be finite and positive");
        }
    }
    if (m.second < m.mean * m.mean * (1.0 - 1e-12)) {
        fail(ValidationFailure::fading_moments_invalid, "second moment below squared mean");
    }
    if (f.family() != FadingFamily::custom) {
        return;
    }
    const QuadratureSpec spec{1e-9, 1e-12, 2000};
    const double mass = integrate_semi_infinite([&](double h) { return f.density(h); }, 0.0, spec).value;
    if (std::abs(mass - 1.0) > 1e-6) {
        fail(ValidationFailure::fading_density_not_normalized, "density integrates to " + std::to_string(mass));
    }
    for (int j = 1; j <= 3; ++j) {
        const double numeric =
            integrate_semi_infinite([&](double h) { return std::pow(h, j) * f.density(h); }, 0.0, spec).value;
        if (std::abs(numeric - m.raw(j)) > 1e-6 * std::abs(m.raw(j))) {
            fail(ValidationFailure::fading_moments_inconsistent,
                 "moment " + std::to_string(j) + " disagrees with the density");
        }
    }
}

}  // namespace detail

/// Checks every model invariant and returns the configuration unchanged, or
/// throws ValidationError naming the first violation.
inline NetworkConfig validate_network(NetworkConfig cfg) {
    if (cfg.tiers.empty()) {
        throw ValidationError(ValidationFailure::no_tiers, std::nullopt, "at least one tier is required");
    }
    if (!(cfg.noise >= 0.0) || !std::isfinite(cfg.noise)) {
        throw ValidationError(ValidationFailure::negative_noise, std::nullopt, "noise power must be >= 0");
    }
    if (!(cfg.processing_gain >= 1.0) || !std::isfinite(cfg.processing_gain)) {
        throw ValidationError(ValidationFailure::processing_gain_below_one, std::nullopt,
                              "processing gain must be >= 1");
    }
    for (std::size_t k = 0; k < cfg.tiers.size(); ++k) {
        const auto& t = cfg.tiers[k];
        if (!(t.power > 0.0) || !std::isfinite(t.power)) {
            throw ValidationError(ValidationFailure::nonpositive_power, k, "power must be positive");
        }
        if (!(t.intensity > 0.0) || !std::isfinite(t.intensity)) {
            throw ValidationError(ValidationFailure::nonpositive_intensity, k, "intensity must be positive");
        }
        if (!(t.bias > 0.0) || !std::isfinite(t.bias)) {
            throw ValidationError(ValidationFailure::nonpositive_bias, k, "bias must be positive");
        }
        detail::validate_path_loss(t.path_loss, k);
        detail::validate_fading(t.fading, k);
    }
    return cfg;
}

}  // namespace hcn
