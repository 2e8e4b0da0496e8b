#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "fb/polynomial.hpp"

namespace fb {

/// Seeded generator with fixed output mappings, so streams are identical
/// across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0,1)
    return (eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  Vec normal_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Vec unit_vec(int n) {
    Vec v = normal_vec(n);
    while (v.norm() < 1e-12) v = normal_vec(n);
    return v / v.norm();
  }

  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fb
