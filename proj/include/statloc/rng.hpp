#pragma once

#include <cstdint>
#include <random>

namespace statloc {

/// Seedable, splittable generator. Stream `k` of seed `s` is an independent
/// mt19937_64 seeded through std::seed_seq, so every stream is reproducible
/// on any conforming standard library. Integer and real draws are derived by
/// hand rather than through <random> distributions, whose output is
/// implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
    engine_.seed(seq);
  }

  static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(seed, index); }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling on the largest multiple of n.
    const std::uint64_t limit = max() - (max() % n + 1) % n;
    std::uint64_t draw = engine_();
    while (draw > limit) draw = engine_();
    return draw % n;
  }

 private:
  std::mt19937_64 engine_;
};

inline constexpr std::uint64_t kDefaultSeed = 20240229;

}  // namespace statloc
