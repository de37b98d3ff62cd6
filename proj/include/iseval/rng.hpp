#pragma once

// Counter-based random streams. Every stochastic quantity in the library is
// drawn from a Philox4x32-10 stream addressed by (seed, stream id), so results
// depend only on which logical unit of work consumed the stream and never on
// how work was scheduled across threads.

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace iseval {

using Philox4x32Block = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// Raw Philox4x32 with 10 rounds (Salmon et al., SC'11).
constexpr Philox4x32Block philox4x32_10(Philox4x32Block ctr, Philox4x32Key key) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Folds a path of integers into one 64-bit stream id. Distinct paths give
/// distinct ids with overwhelming probability.
constexpr std::uint64_t stream_id(std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC909ull;
  for (auto v : path) h = splitmix64(h ^ splitmix64(v));
  return h;
}

/// A UniformRandomBitGenerator over one Philox stream.
///
/// Key = seed; the upper two counter words hold the stream id and the lower
/// two count 128-bit blocks, so a stream never overlaps another stream.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    if (used_ == 2) refill();
    const auto lo = block_[2 * used_];
    const auto hi = block_[2 * used_ + 1];
    ++used_;
    return (std::uint64_t{hi} << 32) | lo;
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection;
  /// identical on every platform, unlike std::uniform_int_distribution.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t blocks_consumed() const noexcept { return counter_; }

 private:
  constexpr void refill() noexcept {
    block_ = philox4x32_10({static_cast<std::uint32_t>(counter_),
                            static_cast<std::uint32_t>(counter_ >> 32),
                            static_cast<std::uint32_t>(stream_),
                            static_cast<std::uint32_t>(stream_ >> 32)},
                           key_);
    ++counter_;
    used_ = 0;
  }

  Philox4x32Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Philox4x32Block block_{};
  int used_ = 2;
};

}  // namespace iseval
