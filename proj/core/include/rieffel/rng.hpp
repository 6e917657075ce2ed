#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "rieffel/algebra.hpp"

namespace rieffel {

/// Deterministic random source.  Doubles are derived from raw 64-bit draws
/// (not std distributions) so streams are identical across standard
/// libraries, which keeps seeded experiment outputs byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi] (inclusive).
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex normal_complex() { return Complex(normal(), normal()); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rieffel
