#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hcn/model.hpp"
#include "hcn/presets.hpp"

namespace {

using hcn::FadingModel;
using hcn::PathLossModel;
using hcn::ValidationFailure;

// Plain bisection on the forward map, independent of the library's inverse.
double invert_by_bisection(const PathLossModel& g, double y) {
    double lo = 0.0;
    double hi = 1e3;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > y ? lo : hi) = mid;
    }
    return hi;
}

ValidationFailure failure_of(const hcn::NetworkConfig& cfg) {
    try {
        hcn::validate_network(cfg);
    } catch (const hcn::ValidationError& e) {
        return e.failure();
    }
    ADD_FAILURE() << "configuration unexpectedly accepted";
    return ValidationFailure::no_tiers;
}

}  // namespace

TEST(PathLoss, BoundedPowerInverseExamples) {
    const auto g = PathLossModel::bounded_power(3.0);
    EXPECT_NEAR(hcn::path_loss_inverse(g, 0.5), 1.0, 1e-14);
    EXPECT_EQ(hcn::path_loss_inverse(g, 2.0), 0.0);
    EXPECT_NEAR(hcn::path_loss_inverse(g, 0.125), 1.912931182772389, 1e-12);
    EXPECT_NEAR(hcn::path_loss_inverse(g, 0.125), invert_by_bisection(g, 0.125), 1e-10);
    EXPECT_EQ(hcn::path_loss_inverse(g, 0.0), hcn::kInfinity);
    EXPECT_EQ(hcn::path_loss_inverse(g, 1.0), 0.0);
    EXPECT_THROW(hcn::path_loss_inverse(g, -0.1), hcn::InvalidInput);
}

TEST(PathLoss, RoundTripOnGrid) {
    const PathLossModel models[] = {PathLossModel::bounded_power(3.0), PathLossModel::bounded_power(4.5),
                                    PathLossModel::capped_power(3.5),
                                    PathLossModel::custom(3.0, [](double t) { return std::exp(-t) / (1.0 + t * t * t); })};
    for (const auto& g : models) {
        for (double x = 1e-3; x < 60.0; x *= 1.3) {
            if (g.family() == hcn::PathLossFamily::capped_power && x <= 1.0) continue;  // flat region
            const double back = g.inverse(g(x));
            // Near the origin G is flat to O(x^alpha), so x itself is not recoverable; compare gains there.
            if (x < 0.05) {
                EXPECT_NEAR(g(back), g(x), 2e-12) << "x=" << x;  // bisection stops at 1e-12 in x
            } else {
                EXPECT_NEAR(back, x, 1e-9 * std::max(1.0, x)) << "x=" << x;
            }
        }
    }
}

TEST(PathLoss, CappedPowerFlatRegionInverseIsInfimum) {
    const auto g = PathLossModel::capped_power(3.0);
    EXPECT_EQ(g(0.5), 1.0);
    EXPECT_EQ(g.inverse(1.0), 0.0);
    EXPECT_NEAR(g.inverse(0.125), 2.0, 1e-14);
}

TEST(Fading, NakagamiMomentsClosedForm) {
    const auto m5 = hcn::nakagami_moments(5.0);
    EXPECT_DOUBLE_EQ(m5.mean, 1.0);
    EXPECT_DOUBLE_EQ(m5.second, 1.2);
    EXPECT_DOUBLE_EQ(m5.third, 1.68);
    const auto m1 = hcn::nakagami_moments(1.0);
    EXPECT_DOUBLE_EQ(m1.second, 2.0);
    EXPECT_DOUBLE_EQ(m1.third, 6.0);
    const auto big = hcn::nakagami_moments(1e6);
    EXPECT_NEAR(big.second, 1.0, 1e-5);
    EXPECT_NEAR(big.third, 1.0, 1e-5);
    EXPECT_THROW(hcn::nakagami_moments(0.0), hcn::InvalidInput);
    EXPECT_THROW(hcn::nakagami_moments(-2.0), hcn::InvalidInput);
}

TEST(Fading, MomentsMatchDensityIntegrals) {
    for (double m : {0.7, 1.0, 2.5, 5.0}) {
        const auto f = FadingModel::nakagami(m);
        for (int j = 1; j <= 3; ++j) {
            // Integrate on [0, 1] (endpoint singularity for m < 1 handled by adaptivity) plus the tail.
            const hcn::QuadratureSpec spec{1e-12, 1e-15, 4000};
            auto integrand = [&](double h) { return std::pow(h, j) * f.density(h); };
            const double v = hcn::integrate_finite(integrand, 0.0, 1.0, spec).value +
                             hcn::integrate_semi_infinite(integrand, 1.0, spec).value;
            EXPECT_NEAR(v / f.moments().raw(j), 1.0, 1e-8) << "m=" << m << " j=" << j;
        }
    }
}

TEST(Fading, SamplerMomentsConverge) {
    for (double m : {1.0, 5.0}) {
        const auto f = FadingModel::nakagami(m);
        hcn::CounterRng rng(99, 0, 0, hcn::StreamPurpose::test);
        const int n = 1000000;
        double s1 = 0, s2 = 0, s3 = 0;
        for (int i = 0; i < n; ++i) {
            const double h = f.sample(rng);
            s1 += h;
            s2 += h * h;
            s3 += h * h * h;
        }
        const auto mm = f.moments();
        // Standard errors from the Gamma(m, 1/m) raw moments up to order 6.
        auto raw = [m](int j) {
            double r = 1.0;
            for (int i = 0; i < j; ++i) r *= (m + i) / m;
            return r;
        };
        EXPECT_NEAR(s1 / n, mm.mean, 4.0 * std::sqrt((raw(2) - 1.0) / n));
        EXPECT_NEAR(s2 / n, mm.second, 4.0 * std::sqrt((raw(4) - raw(2) * raw(2)) / n));
        EXPECT_NEAR(s3 / n, mm.third, 4.0 * std::sqrt((raw(6) - raw(3) * raw(3)) / n));
    }
}

TEST(Fading, SamplerPassesKolmogorovSmirnov) {
    for (double m : {1.0, 5.0}) {
        const auto f = FadingModel::nakagami(m);
        hcn::CounterRng rng(7, 1, 2, hcn::StreamPurpose::test);
        std::vector<double> s(100000);
        for (auto& v : s) v = f.sample(rng);
        std::sort(s.begin(), s.end());
        double d = 0.0;
        const double n = static_cast<double>(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double c = f.cdf(s[i]);
            d = std::max({d, c - i / n, (i + 1) / n - c});
        }
        EXPECT_LT(d, 0.01) << "m=" << m;
    }
}

TEST(Fading, RayleighIsUnitExponential) {
    const auto f = FadingModel::rayleigh();
    EXPECT_NEAR(f.cdf(1.0), 1.0 - std::exp(-1.0), 1e-14);
    EXPECT_NEAR(f.density(0.3), std::exp(-0.3), 1e-14);
    EXPECT_NEAR(f.quantile(0.5), std::log(2.0), 1e-12);
}

TEST(Fading, QuantileInvertsCdf) {
    const auto f = FadingModel::nakagami(5.0);
    for (double p : {0.001, 0.15, 0.5, 0.9999}) {
        EXPECT_NEAR(f.cdf(f.quantile(p)), p, 1e-12);
    }
}

TEST(Validation, ReferenceScenarioAccepted) {
    EXPECT_NO_THROW(hcn::validate_network(hcn::presets::three_tier(1.0)));
    EXPECT_NO_THROW(hcn::validate_network(hcn::presets::two_tier(0.3, 4.0)));
}

TEST(Validation, EachInvariantHasItsOwnFailure) {
    auto base = hcn::presets::two_tier(1.0);
    {
        auto c = base;
        c.tiers[1].intensity = 0.0;
        EXPECT_EQ(failure_of(c), ValidationFailure::nonpositive_intensity);
    }
    {
        auto c = base;
        c.tiers[0].power = -1.0;
        EXPECT_EQ(failure_of(c), ValidationFailure::nonpositive_power);
    }
    {
        auto c = base;
        c.tiers[0].bias = 0.0;
        EXPECT_EQ(failure_of(c), ValidationFailure::nonpositive_bias);
    }
    {
        auto c = base;
        c.tiers[1].path_loss = PathLossModel::bounded_power(1.5);
        EXPECT_EQ(failure_of(c), ValidationFailure::path_loss_exponent_too_small);
    }
    {
        auto c = base;
        c.noise = -1.0;
        EXPECT_EQ(failure_of(c), ValidationFailure::negative_noise);
    }
    {
        auto c = base;
        c.processing_gain = 0.5;
        EXPECT_EQ(failure_of(c), ValidationFailure::processing_gain_below_one);
    }
    {
        hcn::NetworkConfig c;
        EXPECT_EQ(failure_of(c), ValidationFailure::no_tiers);
    }
    {
        auto c = base;
        c.tiers[0].path_loss = PathLossModel::custom(3.0, [](double t) { return t < 1.0 ? 0.5 : 1.0 / (t * t * t); });
        EXPECT_EQ(failure_of(c), ValidationFailure::path_loss_increasing);
    }
    {
        auto c = base;
        c.tiers[0].path_loss = PathLossModel::custom(3.0, [](double t) { return 1.0 / (1.0 + t * t); });
        EXPECT_EQ(failure_of(c), ValidationFailure::path_loss_decay_too_slow);
    }
    {
        auto c = base;
        c.tiers[0].fading = FadingModel::custom([](double h) { return 2.0 * std::exp(-h); }, {1.0, 2.0, 6.0},
                                                [](hcn::CounterRng& r) { return -std::log(r.uniform()); });
        EXPECT_EQ(failure_of(c), ValidationFailure::fading_density_not_normalized);
    }
    {
        auto c = base;
        c.tiers[0].fading = FadingModel::custom([](double h) { return std::exp(-h); }, {1.0, 2.0, 5.0},
                                                [](hcn::CounterRng& r) { return -std::log(r.uniform()); });
        EXPECT_EQ(failure_of(c), ValidationFailure::fading_moments_inconsistent);
    }
}

TEST(Validation, ConsistentCustomFadingAccepted) {
    auto c = hcn::presets::two_tier(1.0);
    c.tiers[0].fading = FadingModel::custom([](double h) { return std::exp(-h); }, {1.0, 2.0, 6.0},
                                            [](hcn::CounterRng& r) { return -std::log(r.uniform()); });
    EXPECT_NO_THROW(hcn::validate_network(c));
}

TEST(Validation, ErrorNamesTier) {
    auto c = hcn::presets::three_tier(1.0);
    c.tiers[2].intensity = -3.0;
    try {
        hcn::validate_network(c);
        FAIL();
    } catch (const hcn::ValidationError& e) {
        ASSERT_TRUE(e.tier().has_value());
        EXPECT_EQ(*e.tier(), 2u);
        EXPECT_NE(std::string(e.what()).find("nonpositive_intensity"), std::string::npos);
    }
}

TEST(Network, SnrInverseIsZeroWithoutNoise) {
    auto c = hcn::presets::two_tier(1.0);
    EXPECT_EQ(c.snr_inverse(0), 0.0);
    c.noise = 2.0;
    EXPECT_DOUBLE_EQ(c.snr_inverse(1), 0.5);
}
