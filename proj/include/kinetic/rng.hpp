#pragma once

#include <cmath>
#include <cstdint>

namespace kinetic {

/// Counter-based random streams.
///
/// Every stream is identified by a 64-bit key; outputs are a stateless hash of
/// (key, counter). Streams with distinct keys are statistically independent,
/// which lets the simulator assign one stream per (step, particle) and obtain
/// results that do not depend on thread count or evaluation order.
namespace rng_detail {

// SplitMix64 finalizer (Stafford mix 13). Passes BigCrush as a counter PRNG.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t tag) noexcept {
    return mix(key ^ (tag * 0xd6e8feb86659fd93ULL) ^ 0xa0761d6478bd642fULL);
}

}  // namespace rng_detail

class Substream {
  public:
    explicit Substream(std::uint64_t key) noexcept : key_(key) {}

    /// Derived stream; children with distinct tags never collide in practice.
    Substream child(std::uint64_t tag) const noexcept {
        return Substream(rng_detail::combine(key_, tag));
    }
    Substream child(std::uint64_t a, std::uint64_t b) const noexcept {
        return child(a).child(b);
    }

    std::uint64_t key() const noexcept { return key_; }

    std::uint64_t next_u64() noexcept {
        return rng_detail::mix(key_ ^ (counter_++ * 0x2545f4914f6cdd1dULL));
    }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) noexcept { return a + (b - a) * next_double(); }

    /// Unbiased index in {0, ..., n-1} (rejection against the modulus bias).
    std::uint64_t uniform_index(std::uint64_t n) noexcept {
        if (n <= 1) {
            if (n == 1) next_u64();  // keep stream consumption independent of n
            return 0;
        }
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
    double normal() noexcept {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double exponential(double rate) noexcept {
        double u = next_double();
        while (u <= 0.0) u = next_double();
        return -std::log(u) / rate;
    }

    /// Exact Poisson sample. Knuth's product method below a mean of 32; larger
    /// means are split in half recursively (Poisson additivity keeps it exact).
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 32.0) {
            const double half = mean * 0.5;
            return poisson(half) + poisson(mean - half);
        }
        const double threshold = std::exp(-mean);
        std::uint64_t k = 0;
        double p = next_double();
        while (p > threshold) {
            ++k;
            p *= next_double();
        }
        return k;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Root stream of a run. All randomness in the library descends from here.
inline Substream root_stream(std::uint64_t seed) noexcept {
    return Substream(rng_detail::mix(seed ^ 0x6a09e667f3bcc908ULL));
}

}  // namespace kinetic
