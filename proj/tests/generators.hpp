#pragma once

// Seeded input generators for property tests. Each property runs over a
// fixed list of seeds so failures are reproducible from the captured seed.

#include <cstdint>
#include <vector>

#include "doctest.h"
#include "orlicz/body.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/random.hpp"
#include "oracles.hpp"

namespace gen {

template <class F>
void for_seeds(int count, std::uint64_t base, F&& property) {
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = orlicz::derive_seed(base, static_cast<std::uint64_t>(i));
    CAPTURE(seed);
    property(seed);
  }
}

inline orlicz::PolytopeBody polytope(std::uint64_t seed, int n) {
  orlicz::Rng rng(seed);
  const int k = n == 2 ? 4 + static_cast<int>(rng.uniform() * 8) : 6 + static_cast<int>(rng.uniform() * 14);
  return orlicz::random_polytope(n, k, rng.next());
}

inline std::vector<oracle::V2> polygon(const orlicz::PolytopeBody& body) {
  std::vector<oracle::V2> pts;
  for (const auto& v : body.vertices()) pts.emplace_back(v[0], v[1]);
  return oracle::hull2(pts);
}

/// One of the Phi kinds for the given m, all in the class C.
inline orlicz::OrliczFunction phi(std::uint64_t seed, int m) {
  using orlicz::OrliczFunction;
  using orlicz::ScalarConvex;
  orlicz::Rng rng(seed);
  const double p = 1.0 + 2.0 * rng.uniform();
  switch (rng.next() % 5) {
    case 0: return OrliczFunction::abs_power(p, m);
    case 1: return OrliczFunction::pos_part_power(p, m);
    case 2: return OrliczFunction::squared_norm(m);
    case 3:
      return OrliczFunction::composite(ScalarConvex::power(p),
                                       m == 1 ? orlicz::QBody::unit_interval() : orlicz::QBody::delta(m));
    default: {
      std::vector<orlicz::AffinePiece> pieces;
      // One two-sided pair per axis keeps Phi(z) + Phi(-z) > 0.
      for (int j = 0; j < m; ++j) {
        const orlicz::Vec e = orlicz::Vec::Unit(m, j) * (0.5 + rng.uniform());
        pieces.push_back({e, 0.0});
        pieces.push_back({-0.5 * e, 0.0});
      }
      pieces.push_back({rng.unit_vector(m), -0.2});
      return OrliczFunction::max_affine(pieces);
    }
  }
}

inline orlicz::Vec point(double x, double y) {
  orlicz::Vec v(2);
  v << x, y;
  return v;
}

inline orlicz::Vec point(double x, double y, double z) {
  orlicz::Vec v(3);
  v << x, y, z;
  return v;
}

inline orlicz::PolytopeBody triangle() {
  return orlicz::PolytopeBody::from_vertices({point(-1, -1), point(2, -1), point(-1, 1)});
}

}  // namespace gen
