#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace admissions {

/// Seedable random source with a stream that is stable across platforms:
/// the mt19937_64 sequence is pinned by the standard, and the real-valued
/// draws below avoid std::uniform_real_distribution, whose output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1); safe to pass through logs.
  double uniform_open() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard Gumbel draw, -log(-log(U)).
  double gumbel() { return -std::log(-std::log(uniform_open())); }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace admissions
