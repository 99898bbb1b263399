#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <variant>

#include "vemc/errors.hpp"

namespace vemc {

/// Philox4x32 round keys and multipliers (Salmon et al., SC'11).
namespace detail {
inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}
} // namespace detail

/// Philox4x32-10 keyed block function: a pure map from a 128-bit counter and a
/// 64-bit key to 128 pseudo-random bits. Checked against the published
/// known-answer vectors in the test suite.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        detail::philox_round(counter, key);
        key[0] += detail::kPhiloxW0;
        key[1] += detail::kPhiloxW1;
    }
    return counter;
}

/// One substream of a seeded, splittable family of random sequences.
///
/// Draw k of stream (master_seed, stream_index) is a pure function of those
/// three integers, so every iteration of a Monte Carlo loop can own its own
/// substream and the combined output does not depend on how iterations are
/// distributed across workers. The 128-bit Philox counter is laid out as
/// {draw counter lo/hi, stream index lo/hi} with the master seed as key;
/// distinct stream indices therefore can never produce overlapping sequences.
///
/// Counter accounting (one unit == one 128-bit block):
///   next_u64 / next_uniform01     1 block
///   sample_uniform                1 block
///   sample_gaussian               2 blocks (Box-Muller, cosine branch)
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed), stream_index_(stream_index) {}

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

    /// Number of blocks consumed so far.
    std::uint64_t counter() const noexcept { return counter_; }

    /// Next 64 raw bits (words 0 and 1 of the block, word 0 high).
    std::uint64_t next_u64() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(counter_),
            static_cast<std::uint32_t>(counter_ >> 32),
            static_cast<std::uint32_t>(stream_index_),
            static_cast<std::uint32_t>(stream_index_ >> 32),
        };
        const std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(master_seed_),
            static_cast<std::uint32_t>(master_seed_ >> 32),
        };
        const auto out = philox4x32(ctr, key);
        ++counter_;
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double next_uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t counter_ = 0;
};

inline RandomStream derive_substream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return RandomStream(master_seed, stream_index);
}

/// Draw from N(mu, variance). variance == 0 returns mu exactly (degenerate
/// noise used in tests) but still consumes two blocks so the counter advance
/// per call stays fixed.
double sample_gaussian(RandomStream& stream, double mu, double variance);

/// Draw from U[lower, upper).
double sample_uniform(RandomStream& stream, double lower, double upper);

struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;
};

struct Uniform {
    double lower = 0.0;
    double upper = 1.0;
};

/// A validated scalar distribution for influence quantities: Gaussian with
/// strictly positive variance, or Uniform with strictly ordered bounds.
class Distribution {
public:
    Distribution(Gaussian g);
    Distribution(Uniform u);

    double sample(RandomStream& stream) const;

    bool is_gaussian() const noexcept { return std::holds_alternative<Gaussian>(value_); }
    const std::variant<Gaussian, Uniform>& value() const noexcept { return value_; }

private:
    std::variant<Gaussian, Uniform> value_;
};

} // namespace vemc
