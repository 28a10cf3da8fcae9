#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "hcn/error.hpp"

namespace hcn {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Tolerances for the adaptive quadrature kernels. The achieved error is
/// required to fall below max(abs_tol, rel_tol * |result|).
struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 500;

    void check() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
            throw InvalidInput("quadrature tolerances must be positive");
        }
        if (max_subdivisions < 1) {
            throw InvalidInput("quadrature needs at least one subdivision");
        }
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const noexcept { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double pair = f1[j] + f2[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * pair;
        }
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 7; ++j) {
        asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    }
    asc *= std::abs(half);
    abs_sum *= std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * abs_sum, err);
    }
    return {a, b, kronrod * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
/// Throws ConvergenceFailure (carrying the best estimate) when the
/// subdivision budget is exhausted.
template <class F>
QuadratureResult integrate_finite(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    spec.check();
    if (!(a <= b)) {
        throw InvalidInput("integrate_finite requires a <= b");
    }
    if (a == b) {
        return {};
    }
    std::priority_queue<detail::Panel> panels;
    detail::Panel first = detail::gauss_kronrod_15(f, a, b);
    double total = first.value;
    double total_err = first.error;
    panels.push(first);
    std::vector<detail::Panel> frozen;  // panels too narrow to split further
    int subdivisions = 1;
    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (total_err > tolerance() && !panels.empty()) {
        if (subdivisions >= spec.max_subdivisions) {
            throw ConvergenceFailure("adaptive quadrature did not converge within " +
                                         std::to_string(spec.max_subdivisions) + " subdivisions",
                                     total, total_err);
        }
        const detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(std::abs(worst.a), std::abs(worst.b))) {
            frozen.push_back(worst);
            continue;
        }
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++subdivisions;
    }
    // Re-sum from scratch to shed accumulated update drift.
    CompensatedSum value;
    double err = 0.0;
    while (!panels.empty()) {
        value += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    for (const auto& p : frozen) {
        value += p.value;
        err += p.error;
    }
    return {value.value(), err, subdivisions};
}

/// Integral over [a, infinity) through the substitution t = a + u / (1 - u).
/// An infinite lower limit denotes an empty domain and yields 0.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, double a, const QuadratureSpec& spec = {}) {
    if (a == kInfinity) {
        return {};
    }
    if (std::isnan(a) || a == -kInfinity) {
        throw InvalidInput("integrate_semi_infinite requires a finite lower limit");
    }
    auto mapped = [&f, a](double u) {
        const double w = 1.0 - u;
        const double t = a + u / w;
        const double v = f(t);
        return v == 0.0 ? 0.0 : v / (w * w);
    };
    return integrate_finite(mapped, 0.0, 1.0, spec);
}

/// Standard normal CDF via the complementary error function.
inline double std_normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

struct BisectionResult {
    double x = 0.0;
    bool degenerate_at_floor = false;
};

/// sup{x in [lo, hi] : g(x) <= target} for non-decreasing g, located to within tol.
template <class G>
BisectionResult bisect_monotone(G&& g, double target, double lo, double hi, double tol) {
    if (!(lo <= hi) || !(tol > 0.0)) {
        throw InvalidInput("bisect_monotone requires lo <= hi and tol > 0");
    }
    if (g(lo) > target) {
        return {lo, true};
    }
    if (g(hi) <= target) {
        return {hi, false};
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (g(mid) <= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, false};
}

/// Lower empirical quantile: the ceil(p n)-th order statistic.
inline double empirical_quantile(std::span<const double> samples, double p) {
    if (samples.empty()) {
        throw InvalidInput("empirical_quantile of an empty sample");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidInput("empirical_quantile requires 0 < p < 1");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
    return sorted[rank - 1];
}

}  // namespace hcn
