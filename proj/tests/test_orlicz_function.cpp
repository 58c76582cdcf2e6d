#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "orlicz/orlicz_function.hpp"

using namespace orlicz;

namespace {

Vec z1(double a) { return Vec::Constant(1, a); }

}  // namespace

TEST_CASE("evaluation examples") {
  const OrliczFunction abs1 = OrliczFunction::abs_power(1.0);
  CHECK(abs1(z1(3)) == 3.0);
  CHECK(abs1(z1(-3)) == 3.0);

  const OrliczFunction delta = OrliczFunction::composite(ScalarConvex::power(1.0), QBody::delta(2));
  CHECK(delta(gen::point(-2, 1)) == doctest::Approx(2.0));
  CHECK(delta(gen::point(1, 1)) == 0.0);
  CHECK(delta(gen::point(0.5, -3)) == doctest::Approx(3.0));

  const OrliczFunction pos2 = OrliczFunction::pos_part_power(2.0);
  CHECK(pos2(z1(-5)) == 0.0);
  CHECK(pos2(z1(2)) == 4.0);

  CHECK(OrliczFunction::squared_norm(2)(gen::point(3, 4)) == doctest::Approx(25.0));
  CHECK(OrliczFunction::abs_power(1.0, 2)(gen::point(3, 4)) == doctest::Approx(5.0));
  CHECK(OrliczFunction::pos_part_power(1.0, 2)(gen::point(3, -4)) == doctest::Approx(3.0));
}

TEST_CASE("scalar profiles") {
  CHECK(ScalarConvex::power(3.0)(2.0) == doctest::Approx(8.0));
  CHECK(ScalarConvex::exp_minus_one()(1.0) == doctest::Approx(std::exp(1.0) - 1.0));
  const ScalarConvex pl = ScalarConvex::piecewise_linear({1.0, 2.0}, {1.0, 2.0, 5.0});
  CHECK(pl(0.5) == doctest::Approx(0.5));
  CHECK(pl(1.5) == doctest::Approx(2.0));
  CHECK(pl(3.0) == doctest::Approx(1.0 + 2.0 + 5.0));
  CHECK_THROWS_AS(ScalarConvex::power(0.5), Error);
  CHECK_THROWS_AS(ScalarConvex::piecewise_linear({1.0}, {2.0, 1.0}), Error);
  CHECK(ScalarConvex::power(2.0).strictly_convex());
  CHECK_FALSE(ScalarConvex::power(1.0).strictly_convex());
  CHECK(ScalarConvex::exp_minus_one().strictly_convex());
}

TEST_CASE("declared flags") {
  CHECK(OrliczFunction::squared_norm(1).strictly_convex());
  CHECK(OrliczFunction::abs_power(2.0).strictly_convex());
  CHECK_FALSE(OrliczFunction::abs_power(1.0).strictly_convex());
  CHECK(OrliczFunction::abs_power(1.0).even());
  CHECK_FALSE(OrliczFunction::pos_part_power(2.0).even());
  const OrliczFunction c = OrliczFunction::composite(ScalarConvex::power(2.0), QBody::delta(2));
  CHECK_FALSE(c.strictly_convex());
  CHECK(c.profile().strictly_convex());
  CHECK(c.m() == 2);
}

TEST_CASE("Q bodies") {
  CHECK(QBody::unit_interval().support(z1(-2)) == 0.0);
  CHECK(QBody::unit_interval().support(z1(2)) == 2.0);
  CHECK(QBody::delta(3).m() == 3);
  CHECK_THROWS_AS(QBody::from_vertices({gen::point(1, 1), gen::point(2, 1), gen::point(1, 2)}), Error);
  const QBody sym = QBody::from_vertices({z1(-1), z1(1)});
  CHECK(sym.symmetric());
}

TEST_CASE("max-affine pieces") {
  CHECK_THROWS_AS(OrliczFunction::max_affine({{z1(1), 0.5}}), Error);
  const OrliczFunction f = OrliczFunction::max_affine({{z1(1), 0.0}, {z1(-2), 0.0}, {z1(3), -1.0}});
  CHECK(f(z1(0)) == 0.0);
  CHECK(f(z1(-1)) == doctest::Approx(2.0));
  CHECK(f(z1(2)) == doctest::Approx(5.0));
  CHECK_FALSE(f.has_gauge());
  CHECK(OrliczFunction::max_affine({{z1(1), 0.0}, {z1(-2), 0.0}}).has_gauge());
}

TEST_CASE("class C checks") {
  const ClassCReport a = check_class_C(OrliczFunction::abs_power(1.0));
  CHECK(a.pass);
  CHECK(a.min_symmetric_sum == doctest::Approx(2.0));
  const ClassCReport p = check_class_C(OrliczFunction::pos_part_power(1.0));
  CHECK(p.pass);
  CHECK(p.min_symmetric_sum == doctest::Approx(1.0));
  const ClassCReport lin = check_class_C([](const Vec& z) { return z[0]; }, 1);
  CHECK_FALSE(lin.pass);
  CHECK(lin.min_symmetric_sum <= 0.0);
  const ClassCReport concave = check_class_C([](const Vec& z) { return std::sqrt(z.norm()); }, 2);
  CHECK_FALSE(concave.pass);
  CHECK(concave.worst_convexity_defect > 1e-10);
  CHECK_THROWS_AS(check_class_C(OrliczFunction::abs_power(1.0), 10), Error);
}

TEST_CASE("every generated Phi is in the class C") {
  gen::for_seeds(60, 31, [](std::uint64_t seed) {
    const int m = 1 + static_cast<int>(seed % 3);
    const OrliczFunction phi = gen::phi(seed, m);
    CAPTURE(phi.name());
    const ClassCReport r = check_class_C(phi, 300, seed);
    CHECK(r.pass);
    CHECK(r.phi_at_origin == 0.0);
  });
}

TEST_CASE("power composites are homogeneous") {
  gen::for_seeds(30, 32, [](std::uint64_t seed) {
    Rng rng(seed);
    const double p = rng.uniform(1.0, 4.0);
    const OrliczFunction f = OrliczFunction::composite(ScalarConvex::power(p), QBody::delta(2));
    for (int i = 0; i < 10; ++i) {
      const Vec z = rng.normal_vector(2);
      const double c = rng.uniform(0.1, 10.0);
      CHECK(f(c * z) == doctest::Approx(std::pow(c, p) * f(z)).epsilon(1e-12));
    }
  });
}

TEST_CASE("growth at infinity") {
  gen::for_seeds(40, 33, [](std::uint64_t seed) {
    const int m = 1 + static_cast<int>(seed % 2);
    const OrliczFunction phi = gen::phi(seed, m);
    Rng rng(seed);
    for (int i = 0; i < 20; ++i) {
      const Vec z = rng.unit_vector(m);
      if (phi(z) > 0.0) CHECK(phi(100.0 * z) >= 100.0 * phi(z) * (1.0 - 1e-12));
    }
  });
}

TEST_CASE("symmetric max-affine slopes pass the class C check") {
  gen::for_seeds(20, 34, [](std::uint64_t seed) {
    Rng rng(seed);
    const int m = 1;
    const Vec s = rng.unit_vector(m) * rng.uniform(0.5, 2.0);
    const OrliczFunction f = OrliczFunction::max_affine({{s, 0.0}, {-s, 0.0}, {rng.unit_vector(m), 0.0}});
    CHECK(check_class_C(f, 200, seed).pass);
  });
}

TEST_CASE("weighted sums match pointwise evaluation") {
  gen::for_seeds(30, 35, [](std::uint64_t seed) {
    const int m = 1 + static_cast<int>(seed % 3);
    const OrliczFunction phi = gen::phi(seed, m);
    Rng rng(seed);
    std::vector<double> y, c;
    for (int k = 0; k < 12; ++k) {
      for (int j = 0; j < m; ++j) y.push_back(rng.normal());
      c.push_back(rng.uniform(0.1, 2.0));
    }
    const double t = rng.uniform(0.1, 3.0);
    double ref = 0.0;
    for (int k = 0; k < 12; ++k) {
      const Vec z = Eigen::Map<const Vec>(y.data() + k * m, m) * t;
      ref += c[k] * phi(z);
    }
    CHECK(phi.weighted_sum(t, y.data(), c.data(), 12) == doctest::Approx(ref).epsilon(1e-12));
  });
}

TEST_CASE("gauge factorization") {
  gen::for_seeds(30, 36, [](std::uint64_t seed) {
    const int m = 1 + static_cast<int>(seed % 3);
    const OrliczFunction phi = gen::phi(seed, m);
    if (!phi.has_gauge()) return;
    Rng rng(seed);
    for (int i = 0; i < 10; ++i) {
      const Vec z = rng.normal_vector(m);
      CHECK(phi.profile()(phi.gauge(z.data())) == doctest::Approx(phi(z)).epsilon(1e-12));
      CHECK(phi.gauge((3.0 * z).eval().data()) == doctest::Approx(3.0 * phi.gauge(z.data())).epsilon(1e-12));
    }
  });
}
