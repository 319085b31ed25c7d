#pragma once

#include <cstdint>
#include <random>

#include "lpval/complex_value.hpp"

namespace lpval {

/// Deterministic random source.
///
/// The engine is std::mt19937_64, which is bit-exact across platforms by
/// specification. The uniform mappings below are hand-rolled because
/// std::uniform_real_distribution output is implementation-defined, and
/// reports promise bit-identical reruns for identical (scenario, seed).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  /// Uniform integer in [lo, hi], inclusive.
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool coin() { return (engine_() & 1u) != 0; }

  /// Uniform over the square [-r, r] x [-r, r].
  Complex complex_in_square(double r) {
    const double re = uniform(-r, r);
    const double im = uniform(-r, r);
    return {re, im};
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace lpval
