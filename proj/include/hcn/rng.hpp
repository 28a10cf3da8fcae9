#pragma once

#include <cstdint>
#include <limits>

namespace hcn {

/// Purpose tags that separate the random substreams of one Monte Carlo trial.
enum class StreamPurpose : std::uint64_t {
    points = 1,
    fading = 2,
    serving = 3,
    tail = 4,
    test = 99,
};

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator: the n-th output is a keyed hash of n, so every
/// (seed, trial, stream, purpose) tuple addresses an independent substream
/// without any shared state. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream,
               StreamPurpose purpose) noexcept {
        std::uint64_t k = detail::mix64(seed ^ 0x6A09E667F3BCC909ULL);
        k = detail::mix64(k ^ (trial * 0x9E3779B97F4A7C15ULL));
        k = detail::mix64(k ^ (stream * 0xC2B2AE3D27D4EB4FULL));
        key_ = detail::mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0x165667B19E3779F9ULL));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        ++counter_;
        return detail::mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform double on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace hcn
