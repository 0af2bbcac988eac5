#pragma once

#include <cstdint>
#include <random>

#include "trendqp/normal.hpp"

namespace trendqp {

/// Deterministic pseudorandom stream. Same seed, same build => bit-identical
/// draw sequence. Single-owner mutable state: never share one stream between
/// concurrent chains; derive per-chain children instead.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw strictly inside (0, 1): 53-bit mantissa with a half-ulp
  /// offset, so 0 and 1 are unreachable and log(u) is always finite.
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the quantile transform (one uniform per draw).
  double normal() { return normal_quantile(uniform()); }

  /// Independent child stream; used to give each chain its own stream derived
  /// from (base seed, chain index).
  RngStream derive(std::uint64_t index) const {
    std::uint64_t z = seed_ ^ (0x9E3779B97F4A7C15ull * (index + 1));
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return RngStream(z);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace trendqp
