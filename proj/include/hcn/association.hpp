#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "hcn/error.hpp"
#include "hcn/interference.hpp"
#include "hcn/model.hpp"
#include "hcn/numerics.hpp"

namespace hcn {

/// Descending enumeration of the activation thresholds seen from serving tier k.
///
/// Entry 0 is the +inf sentinel and entry K the 0 sentinel; the K-1 entries in
/// between are the other tiers i with threshold a_i = beta_i P_i G_i(0) / (beta_k P_k).
/// On segment j = 1..K, i.e. u in [radius(j-1), radius(j)), the tiers of entries
/// 1..j-1 have a positive exclusion radius Q_i(u) and all others have Q_i(u) = 0.
struct BreakpointTable {
    struct Entry {
        std::optional<std::size_t> tier;  ///< empty for the two sentinels
        double threshold;
        double radius;  ///< G_k^{-1}(threshold)
    };

    std::size_t serving = 0;
    std::vector<Entry> entries;

    std::size_t segment_count() const noexcept { return entries.empty() ? 0 : entries.size() - 1; }
    double segment_begin(std::size_t j) const { return entries.at(j - 1).radius; }
    double segment_end(std::size_t j) const { return entries.at(j).radius; }

    /// Segment j (1-based) with u in [r_{j-1}, r_j).
    std::size_t segment_of(double u) const {
        for (std::size_t j = 1; j <= segment_count(); ++j) {
            if (u < segment_end(j)) {
                return j;
            }
        }
        return segment_count();
    }
};

inline BreakpointTable breakpoints(const NetworkConfig& cfg, std::size_t k) {
    if (k >= cfg.tier_count()) {
        throw InvalidInput("serving tier index out of range");
    }
    const auto& serving = cfg.tiers[k];
    BreakpointTable table;
    table.serving = k;
    std::vector<BreakpointTable::Entry> others;
    for (std::size_t i = 0; i < cfg.tier_count(); ++i) {
        if (i == k) {
            continue;
        }
        const auto& t = cfg.tiers[i];
        others.push_back({i, t.bias * t.power * t.path_loss.at_origin() / (serving.bias * serving.power), 0.0});
    }
    // Ties resolve by ascending tier index.
    std::stable_sort(others.begin(), others.end(),
                     [](const auto& a, const auto& b) { return a.threshold > b.threshold; });
    table.entries.push_back({std::nullopt, kInfinity, 0.0});
    table.entries.insert(table.entries.end(), others.begin(), others.end());
    table.entries.push_back({std::nullopt, 0.0, 0.0});
    for (auto& e : table.entries) {
        e.radius = serving.path_loss.inverse(e.threshold);
    }
    return table;
}

namespace detail {

/// lambda_k u^2 + sum over active tiers of lambda_i Q_i(u)^2 on segment j.
inline double void_exponent(const NetworkConfig& cfg, const BreakpointTable& table, std::size_t j, double u) {
    const auto& serving = cfg.tiers[table.serving];
    const double received = serving.bias * serving.power * serving.path_loss(u);
    double acc = serving.intensity * u * u;
    for (std::size_t e = 1; e < j; ++e) {
        const auto& t = cfg.tiers[*table.entries[e].tier];
        const double q = t.path_loss.inverse(received / (t.bias * t.power));
        acc += t.intensity * q * q;
    }
    return acc;
}

/// 2 pi lambda_k u exp(-pi * exponent): joint density of (A = k, R = u).
inline double joint_density(const NetworkConfig& cfg, const BreakpointTable& table, double u) {
    if (u < 0.0 || u == kInfinity) {
        return 0.0;
    }
    const std::size_t j = table.segment_of(u);
    const double lambda = cfg.tiers[table.serving].intensity;
    return 2.0 * std::numbers::pi * lambda * u * std::exp(-std::numbers::pi * void_exponent(cfg, table, j, u));
}

/// Integrates fn over [0, inf) split at the table's breakpoints; empty segments are skipped.
template <class F>
double integrate_over_segments(const BreakpointTable& table, F&& fn, const QuadratureSpec& spec) {
    CompensatedSum total;
    for (std::size_t j = 1; j <= table.segment_count(); ++j) {
        const double lo = table.segment_begin(j);
        const double hi = table.segment_end(j);
        if (!(hi > lo)) {
            continue;
        }
        if (hi == kInfinity) {
            total += integrate_semi_infinite(fn, lo, spec).value;
        } else {
            total += integrate_finite(fn, lo, hi, spec).value;
        }
    }
    return total.value();
}

inline constexpr QuadratureSpec kAssociationQuadrature{1e-11, 1e-14, 1000};

}  // namespace detail

/// P(A = k): probability that tier k serves the user.
inline double association_probability(const NetworkConfig& cfg, std::size_t k) {
    const auto table = breakpoints(cfg, k);
    const double p = detail::integrate_over_segments(
        table, [&](double u) { return detail::joint_density(cfg, table, u); }, detail::kAssociationQuadrature);
    return std::clamp(p, 0.0, 1.0);
}

/// Association probabilities of every tier plus the conditional serving-distance
/// densities f_k(u), with the breakpoint tables computed once.
class AssociationStats {
public:
    explicit AssociationStats(const NetworkConfig& cfg) : cfg_(cfg) {
        for (std::size_t k = 0; k < cfg_.tier_count(); ++k) {
            tables_.push_back(breakpoints(cfg_, k));
            const auto& table = tables_.back();
            p_star_.push_back(std::clamp(
                detail::integrate_over_segments(
                    table, [&](double u) { return detail::joint_density(cfg_, table, u); },
                    detail::kAssociationQuadrature),
                0.0, 1.0));
        }
    }

    std::size_t tier_count() const noexcept { return p_star_.size(); }
    double p_star(std::size_t k) const { return p_star_.at(k); }
    const std::vector<double>& p_star() const noexcept { return p_star_; }
    const BreakpointTable& table(std::size_t k) const { return tables_.at(k); }

    /// p_k f_k(u).
    double joint_density(std::size_t k, double u) const { return detail::joint_density(cfg_, tables_.at(k), u); }

    /// f_k(u), the density of the serving distance given tier k serves.
    double pdf(std::size_t k, double u) const {
        if (!(p_star_.at(k) > 0.0)) {
            throw UndefinedConditional("tier " + std::to_string(k + 1) + " has zero association probability");
        }
        return joint_density(k, u) / p_star_[k];
    }

    const NetworkConfig& config() const noexcept { return cfg_; }

private:
    NetworkConfig cfg_;
    std::vector<BreakpointTable> tables_;
    std::vector<double> p_star_;
};

/// f_k(u) evaluated from scratch (computes p_k internally).
inline double conditional_distance_pdf(const NetworkConfig& cfg, std::size_t k, double u) {
    if (!(u >= 0.0)) {
        throw InvalidInput("serving distance must be non-negative");
    }
    const double p = association_probability(cfg, k);
    if (!(p > 0.0)) {
        throw UndefinedConditional("tier " + std::to_string(k + 1) + " has zero association probability");
    }
    const auto table = breakpoints(cfg, k);
    return detail::joint_density(cfg, table, u) / p;
}

/// Closed-form conditional distance densities for two tiers with
/// beta_1 P_1 G_1(0) <= beta_2 P_2 G_2(0). Callers with the opposite ordering
/// should swap the tiers first.
struct TwoTierPdfs {
    std::function<double(double)> f1;
    std::function<double(double)> f2;
    double u_star = 0.0;  ///< G_2^{-1}(beta_1 P_1 G_1(0) / (beta_2 P_2))
};

inline TwoTierPdfs two_tier_pdfs(const NetworkConfig& cfg) {
    if (cfg.tier_count() != 2) {
        throw InvalidConfiguration("two_tier_pdfs needs exactly two tiers");
    }
    const auto& t1 = cfg.tiers[0];
    const auto& t2 = cfg.tiers[1];
    if (t1.bias * t1.power * t1.path_loss.at_origin() > t2.bias * t2.power * t2.path_loss.at_origin()) {
        throw InvalidConfiguration("two_tier_pdfs needs beta1 P1 G1(0) <= beta2 P2 G2(0); swap the tiers");
    }
    const double p1 = association_probability(cfg, 0);
    const double p2 = association_probability(cfg, 1);
    if (!(p1 > 0.0) || !(p2 > 0.0)) {
        throw UndefinedConditional("a tier has zero association probability");
    }
    constexpr double pi = std::numbers::pi;
    TwoTierPdfs out;
    out.u_star = t2.path_loss.inverse(t1.bias * t1.power * t1.path_loss.at_origin() / (t2.bias * t2.power));
    out.f1 = [t1, t2, p1](double u) {
        if (u < 0.0) return 0.0;
        const double q = t2.path_loss.inverse(t1.bias * t1.power * t1.path_loss(u) / (t2.bias * t2.power));
        return 2.0 * pi * t1.intensity / p1 * u * std::exp(-pi * (t1.intensity * u * u + t2.intensity * q * q));
    };
    out.f2 = [t1, t2, p2, u_star = out.u_star](double u) {
        if (u < 0.0) return 0.0;
        const double scale = 2.0 * pi * t2.intensity / p2 * u;
        if (u < u_star) {
            return scale * std::exp(-pi * t2.intensity * u * u);
        }
        const double q = t1.path_loss.inverse(t2.bias * t2.power * t2.path_loss(u) / (t1.bias * t1.power));
        return scale * std::exp(-pi * (t2.intensity * u * u + t1.intensity * q * q));
    };
    return out;
}

}  // namespace hcn
