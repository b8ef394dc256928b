#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ugw {

/// SplitMix64: a counter-based 64-bit generator. The n-th output is a fixed
/// bijective mix of `seed + n * 0x9E3779B97F4A7C15`, so streams are
/// reproducible on every platform. All randomness in the library flows
/// through this type; the floating-point helpers below avoid <random>
/// distributions, whose output is implementation-defined.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t r;
        do {
            r = operator()();
        } while (r >= limit);
        return r % n;
    }

    /// Standard normal by Box-Muller (one draw per call).
    double normal() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 == 0.0);
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Independent stream derived from this seed and a stream index.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(mix(seed ^ mix(index + 0x632BE59BD9B4E019ULL)));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

}  // namespace ugw
