#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "orlicz/linalg.hpp"

namespace orlicz {

/// splitmix64 finalizer; used to derive independent per-task seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix_seed(mix_seed(seed) ^ (index + 0x632be59bd9b4e019ULL));
}

/// Random source with a platform-stable stream. Distributions are derived
/// by hand from mt19937_64 bits because std::normal_distribution is
/// implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec normal_vector(int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

  Vec unit_vector(int d) {
    for (;;) {
      Vec v = normal_vector(d);
      const double r = v.norm();
      if (r > 1e-12) return v / r;
    }
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Random rotation (Haar-ish via QR of a Gaussian matrix, det forced to +1).
Mat random_rotation(int n, Rng& rng);

/// Random element of SL(n): rotation * diag(stretch) * unit-upper shear * rotation.
Mat random_unimodular(int n, Rng& rng, double max_stretch = 2.0, double max_shear = 1.0);

}  // namespace orlicz
