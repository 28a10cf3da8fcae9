#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "hcn/error.hpp"
#include "hcn/model.hpp"
#include "hcn/numerics.hpp"

namespace hcn {

/// Per-tier exclusion radii d_i around the user; +inf removes a tier entirely.
using ExclusionVector = std::vector<double>;

/// Which normalisation of the Berry-Esseen coefficient to use.
///  - printed:  (1/sqrt(2 pi)) S3 / S2^{3/2}, with S_j = sum_i lambda_i P_i^j m_{H^j} int G_i^j(t) t dt
///  - campbell: (1/sqrt(2 pi)) S3 / (2 pi S2)^{3/2}, i.e. the Campbell variance in the denominator
///  - zero:     forces an exact Gaussian (diagnostics only)
enum class XiVariant { printed, campbell, zero };

inline const char* to_string(XiVariant v) noexcept {
    switch (v) {
        case XiVariant::printed: return "xi-printed";
        case XiVariant::campbell: return "xi-campbell";
        case XiVariant::zero: return "xi-zero";
    }
    return "unknown";
}

struct InterferenceMoments {
    double mean = 0.0;
    double variance = 0.0;
    double xi = 0.0;

    double stddev() const noexcept { return std::sqrt(variance); }
};

/// int_d^inf G(t)^j t dt.
inline double shot_noise_integral(const PathLossModel& g, int j, double d,
                                  const QuadratureSpec& spec = {1e-11, 1e-300, 500}) {
    if (d == kInfinity) {
        return 0.0;
    }
    if (g.family() == PathLossFamily::capped_power) {
        const double decay = j * g.alpha() - 2.0;
        if (d >= 1.0) {
            return std::pow(d, -decay) / decay;
        }
        return 0.5 * (1.0 - d * d) + 1.0 / decay;
    }
    return integrate_semi_infinite([&](double t) { return std::pow(g(t), j) * t; }, d, spec).value;
}

/// Mean and variance of the shot-noise interference from PPP tiers outside
/// the exclusion discs (Campbell), plus the Berry-Esseen coefficient.
inline InterferenceMoments interference_moments(const NetworkConfig& cfg, std::span<const double> excl,
                                                XiVariant variant = XiVariant::printed) {
    if (excl.size() != cfg.tier_count()) {
        throw InvalidInput("exclusion vector length must equal the tier count");
    }
    CompensatedSum s1;
    CompensatedSum s2;
    CompensatedSum s3;
    for (std::size_t i = 0; i < excl.size(); ++i) {
        if (!(excl[i] >= 0.0)) {
            throw InvalidInput("exclusion radii must be non-negative");
        }
        if (excl[i] == kInfinity) {
            continue;
        }
        const auto& tier = cfg.tiers[i];
        const auto& m = tier.fading.moments();
        const double p = tier.power;
        s1 += tier.intensity * p * m.mean * shot_noise_integral(tier.path_loss, 1, excl[i]);
        s2 += tier.intensity * p * p * m.second * shot_noise_integral(tier.path_loss, 2, excl[i]);
        s3 += tier.intensity * p * p * p * m.third * shot_noise_integral(tier.path_loss, 3, excl[i]);
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    InterferenceMoments out;
    out.mean = two_pi * s1.value();
    out.variance = two_pi * s2.value();
    if (!(out.variance > 0.0)) {
        throw DegenerateInterference("every tier is excluded; interference is identically zero");
    }
    const double inv_sqrt_2pi = 1.0 / std::sqrt(two_pi);
    switch (variant) {
        case XiVariant::printed:
            out.xi = inv_sqrt_2pi * s3.value() / std::pow(s2.value(), 1.5);
            break;
        case XiVariant::campbell:
            out.xi = inv_sqrt_2pi * s3.value() / std::pow(out.variance, 1.5);
            break;
        case XiVariant::zero:
            out.xi = 0.0;
            break;
    }
    return out;
}

/// c(x) = min(0.4785, 31.935 / (1 + |x|^3)).
inline double berry_esseen_c(double x) noexcept {
    const double ax = std::abs(x);
    return std::min(0.4785, 31.935 / (1.0 + ax * ax * ax));
}

struct CdfBand {
    double lower = 0.0;
    double upper = 1.0;
};

/// Band around the standard normal CDF that contains P(standardized I <= x).
inline CdfBand gaussian_cdf_band(const InterferenceMoments& moments, double x) noexcept {
    const double psi = std_normal_cdf(x);
    const double slack = moments.xi * berry_esseen_c(x);
    return {std::max(0.0, psi - slack), std::min(1.0, psi + slack)};
}

/// Exclusion radii seen by a user served by tier k at distance r under biased
/// received-signal-strength association: Q_i(r) = G_i^{-1}(beta_k P_k G_k(r) / (beta_i P_i)),
/// and r itself for the serving tier.
inline ExclusionVector barss_exclusions(const NetworkConfig& cfg, std::size_t k, double r) {
    if (k >= cfg.tier_count()) {
        throw InvalidInput("serving tier index out of range");
    }
    if (!(r >= 0.0)) {
        throw InvalidInput("serving distance must be non-negative");
    }
    const auto& serving = cfg.tiers[k];
    const double received = serving.bias * serving.power * serving.path_loss(r);
    ExclusionVector out(cfg.tier_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i == k) {
            out[i] = r;
            continue;
        }
        const auto& t = cfg.tiers[i];
        out[i] = t.path_loss.inverse(received / (t.bias * t.power));
    }
    return out;
}

}  // namespace hcn
