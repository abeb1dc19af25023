#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "crowdsim/types.hpp"

namespace crowdsim {

// All randomness in the simulator flows through named streams derived from a
// master seed, so policy comparisons are paired (common random numbers) and
// reruns are bit-identical regardless of the standard library in use.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream tags. Keeping them in one place avoids accidental collisions.
namespace streams {
constexpr std::uint64_t kArrivals = 0xA1;
constexpr std::uint64_t kValuations = 0xA2;
constexpr std::uint64_t kRollouts = 0xA3;
constexpr std::uint64_t kSelector = 0xA4;
constexpr std::uint64_t kSynthetic = 0xA5;
constexpr std::uint64_t kRun = 0xA6;
constexpr std::uint64_t kValuationStd = 0xA7;
} // namespace streams

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = master;
    splitmix64(s);
    for (std::uint64_t p : path) {
        s ^= p + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
        splitmix64(s);
    }
    return s;
}

// Small, fast, deterministic generator (splitmix64 core).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Box-Muller; consumes two uniforms per pair, caches the spare.
    double next_gaussian(double mean, double stddev) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0)
            u1 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return mean + stddev * radius * std::cos(angle);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Poisson quantile by inverse-CDF scan: smallest n with F(n) >= u.
// Monotone in lambda for a fixed u, which the estimator relies on for its
// common-random-number coupling. Intended for small lambda.
inline Count poisson_inverse(double lambda, double u) {
    if (lambda <= 0.0)
        return 0;
    double p = std::exp(-lambda);
    double cum = p;
    Count n = 0;
    while (u > cum && n < 1'000'000) {
        ++n;
        p *= lambda / n;
        cum += p;
        if (p == 0.0)
            break;
    }
    return n;
}

} // namespace crowdsim
