// prng.hpp
// Seedable PCG-XSH-RR 64/32 generator with independent streams, plus the
// uniform / Gaussian / shuffle helpers the benchmark harness relies on.
// Identical (seed, stream) pairs reproduce identical sequences bit-exactly.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace qpm {

class Prng {
  public:
    explicit Prng(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted =
            static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Unbiased integer in [0, bound), bound >= 1.
    std::uint32_t next_below(std::uint32_t bound) {
        const std::uint32_t threshold = (-bound) % bound;
        for (;;) {
            const std::uint32_t r = next_u32();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    // 53-bit uniform in [0, 1).
    double uniform() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

    // Fisher-Yates permutation in place.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = next_below(static_cast<std::uint32_t>(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
};

// Stream ids carving one run seed into independent generator streams.
inline constexpr std::uint64_t kStreamData = 1;
inline constexpr std::uint64_t kStreamModel = 2;
inline constexpr std::uint64_t kStreamShuffle = 3;

} // namespace qpm
