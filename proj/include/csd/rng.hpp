#pragma once

#include <array>
#include <cstdint>

namespace csd {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The stream is a pure function of (seed, counter): block k of output is
/// philox(key = seed, counter = k). No global state is involved, so a seed
/// recorded in a report reproduces the exact stream on any platform.
/// All variate transforms below are implemented here rather than taken from
/// <random> distributions, whose algorithms are implementation-defined.
class Philox {
 public:
  explicit Philox(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  double normal();
  double exponential();
  /// Gamma(shape, scale = 1), Marsaglia-Tsang with the shape < 1 boost.
  double gamma(double shape);
  /// +1 or -1 with equal probability.
  int rademacher();

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for replicate `index` of a run seeded with `base`:
/// splitmix64(base ^ splitmix64(index + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace csd
