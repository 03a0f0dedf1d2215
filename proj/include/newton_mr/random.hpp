#pragma once

#include <cstdint>

#include "newton_mr/core.hpp"

namespace nmr {

/// Counter-based generator: the i-th draw is a SplitMix64 hash of
/// (seed, i), so streams are reproducible and cheap to fork.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();

  Vector uniform_vector(Index n, double lo = 0.0, double hi = 1.0);
  Vector normal_vector(Index n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace nmr
