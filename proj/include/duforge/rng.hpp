// Reproducible random streams.
//
// A StreamRng is a deterministic function of (seed, stream): the pair is
// mixed through SplitMix64 into a mt19937_64 state, uniform doubles come
// from the top 53 bits, and Gaussian variates are produced by Box-Muller.
// Every transform is spelled out here (no library distributions), so one
// (seed, stream) pair reproduces the same sequence bit-for-bit.

#pragma once

#include "duforge/core.hpp"

#include <random>

namespace duforge {

struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    RngSeed with_stream(std::uint64_t s) const { return {seed, s}; }
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

class StreamRng {
  public:
    explicit StreamRng(RngSeed s) {
        std::uint64_t x = s.seed;
        const std::uint64_t a = detail::splitmix64(x);
        x ^= 0xD1B54A32D192ED03ull * (s.stream + 1);
        const std::uint64_t b = detail::splitmix64(x);
        engine_.seed(a ^ (b << 1));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal pair via Box-Muller; u1 is kept away from zero.
    std::pair<double, double> normal_pair() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [a, b] = normal_pair();
        spare_ = b;
        have_spare_ = true;
        return a;
    }

    // Complex standard normal: one Box-Muller pair as (re, im).
    Complex complex_normal() {
        auto [a, b] = normal_pair();
        return {a, b};
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace duforge
