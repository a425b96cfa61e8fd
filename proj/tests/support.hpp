// Shared helpers for the unit tests: a seeded value generator and the solved
// parameters, computed once per test binary.
#pragma once

#include <cstdint>
#include <random>

#include "he1/he1.hpp"

namespace he1::test {

/// Small generator for property tests. Every test seeds its own.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  cplx complex_in(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {uniform(re_lo, re_hi), uniform(im_lo, im_hi)};
  }
  /// Point in the box at least `gap` away from every listed point.
  cplx complex_away(double half, const std::vector<cplx>& avoid, double gap) {
    for (;;) {
      const cplx z = complex_in(-half, half, -half, half);
      bool ok = true;
      for (cplx q : avoid) ok = ok && std::abs(z - q) >= gap;
      if (ok) return z;
    }
  }

 private:
  std::mt19937_64 rng_;
};

inline const Solution& solved() {
  static const Solution s = solve_full(default_targets, 0.2, 0.45);
  return s;
}

inline double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }

}  // namespace he1::test
