#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "orlicz/projection_body.hpp"
#include "orlicz/surface_measure.hpp"

using namespace orlicz;
using gen::point;

namespace {

HEvaluator evaluator(const PolytopeBody& k, const OrliczFunction& phi) {
  return HEvaluator(surface_measure(k), phi, MatrixShape{k.dim(), phi.m()}, k.volume());
}

// Profile of Phi on R (m = 1) as a plain function for the reference solver.
std::function<double(double)> scalar(const OrliczFunction& phi) {
  return [phi](double z) { return phi(Vec::Constant(1, z)); };
}

}  // namespace

TEST_CASE("H_x examples") {
  const PolytopeBody sq = named_body("square", 2);
  const HEvaluator abs1 = evaluator(sq, OrliczFunction::abs_power(1.0));
  CHECK(abs1.target() == doctest::Approx(8.0));
  CHECK(abs1(point(1, 0), 1.0) == doctest::Approx(4.0));
  CHECK(abs1(point(0.3, -0.7), 0.0) == 0.0);
  const HEvaluator pos = evaluator(sq, OrliczFunction::pos_part_power(1.0));
  CHECK(pos(point(1, 0), 1.0) == doctest::Approx(2.0));
  CHECK(h_eval_raw(pos, point(1, 0), 1.0) == doctest::Approx(2.0));
}

TEST_CASE("support value examples") {
  const PolytopeBody sq = named_body("square", 2);
  const HEvaluator abs1 = evaluator(sq, OrliczFunction::abs_power(1.0));
  CHECK(solve_support(abs1, point(1, 0)).h == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(solve_support(abs1, point(2, 0)).h == doctest::Approx(1.0).epsilon(1e-12));

  OracleSettings os;
  os.ball_measure = QuadratureSpec{QuadratureScheme::Grid, 4096};
  const ProjectionBodyOracle disc(BallBody(2, 1.0), OrliczFunction::abs_power(1.0), os);
  CHECK(disc.h(point(1, 0)) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-6));
  os.ball_measure = QuadratureSpec{QuadratureScheme::Grid, 65536};
  const ProjectionBodyOracle fine(BallBody(2, 1.0), OrliczFunction::abs_power(1.0), os);
  CHECK(fine.h(point(1, 0)) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-8));
}

TEST_CASE("square oracles in closed form") {
  const PolytopeBody sq = named_body("square", 2);
  const ProjectionBodyOracle abs1(sq, OrliczFunction::abs_power(1.0));
  const ProjectionBodyOracle pos(sq, OrliczFunction::pos_part_power(1.0));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Vec x = rng.unit_vector(2);
    const double l1 = std::abs(x[0]) + std::abs(x[1]);
    CHECK(std::abs(abs1.h(x) - l1 / 2.0) <= 1e-10);
    CHECK(std::abs(pos.h(x) - l1 / 4.0) <= 1e-10);
  }
}

TEST_CASE("closed-form L_p support") {
  const PolytopeBody sq = named_body("square", 2);
  CHECK(lp_closed_form(sq, QBody::unit_interval(), 1.0, point(1, 0)) == doctest::Approx(0.25));
  CHECK(lp_closed_form(sq, QBody::unit_interval(), 2.0, point(1, 0)) == doctest::Approx(0.5));
  CHECK(lp_closed_form(sq, QBody::unit_interval(), 2.0, point(0, 0)) == 0.0);
}

TEST_CASE("closed form against the planar edge-sum oracle") {
  gen::for_seeds(30, 41, [](std::uint64_t seed) {
    const PolytopeBody k = gen::polytope(seed, 2);
    const auto poly = gen::polygon(k);
    Rng rng(seed);
    const double p = rng.uniform(1.0, 3.0);
    for (int i = 0; i < 20; ++i) {
      const Vec x = rng.unit_vector(2);
      const double ref = oracle::lp_support_2d(poly, 0.0, 1.0, p, {x[0], x[1]});
      CHECK(lp_closed_form(k, QBody::unit_interval(), p, x) == doctest::Approx(ref).epsilon(1e-12));
    }
  });
}

TEST_CASE("solver agrees with the closed form") {
  const std::vector<PolytopeBody> bodies{named_body("square", 2), gen::triangle(), random_polytope(3, 12, 3)};
  const std::vector<QBody> qs{QBody::unit_interval(), QBody::delta(2)};
  for (const auto& k : bodies) {
    for (const auto& q : qs) {
      for (double p : {1.0, 1.5, 2.0, 3.0}) {
        const OrliczFunction phi = OrliczFunction::composite(ScalarConvex::power(p), q);
        const HEvaluator e = evaluator(k, phi);
        Rng rng(static_cast<std::uint64_t>(p * 10) + q.m());
        for (int i = 0; i < 1000; ++i) {
          const Vec x = rng.unit_vector(k.dim() * q.m());
          const double ref = lp_closed_form(k, q, p, x);
          CHECK(std::abs(solve_support(e, x).h - ref) <= 1e-8 * ref);
        }
      }
    }
  }
}

TEST_CASE("solver against a plain bisection on the defining equation") {
  // Non-power profiles have no closed form: exp, piecewise linear, and
  // max-affine with a negative intercept.
  const std::vector<OrliczFunction> phis{
      OrliczFunction::composite(ScalarConvex::exp_minus_one(), QBody::from_vertices({Vec::Constant(1, -1), Vec::Constant(1, 2)})),
      OrliczFunction::composite(ScalarConvex::piecewise_linear({0.5, 1.5}, {1.0, 3.0, 4.0}), QBody::unit_interval()),
      OrliczFunction::max_affine({{Vec::Constant(1, 1.0), 0.0}, {Vec::Constant(1, -0.5), 0.0}, {Vec::Constant(1, 2.0), -0.3}}),
      OrliczFunction::abs_power(2.5),
  };
  gen::for_seeds(20, 42, [&](std::uint64_t seed) {
    const PolytopeBody k = gen::polytope(seed, 2);
    const auto poly = gen::polygon(k);
    Rng rng(seed);
    for (const auto& phi : phis) {
      CAPTURE(phi.name());
      const HEvaluator e = evaluator(k, phi);
      for (int i = 0; i < 10; ++i) {
        const Vec x = rng.unit_vector(2) * rng.uniform(0.5, 2.0);
        const double ref = oracle::support_2d(poly, scalar(phi), {x[0], x[1]});
        CHECK(solve_support(e, x).h == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  });
}

TEST_CASE("H_x is nondecreasing and strictly increasing once positive") {
  gen::for_seeds(30, 43, [](std::uint64_t seed) {
    const int n = 2 + static_cast<int>(seed % 2);
    const int m = 1 + static_cast<int>((seed >> 3) % 2);
    const PolytopeBody k = gen::polytope(seed, n);
    const OrliczFunction phi = gen::phi(seed, m);
    const HEvaluator e = evaluator(k, phi);
    Rng rng(seed);
    const Vec x = rng.unit_vector(n * m);
    double prev = 0.0;
    bool positive = false;
    for (int i = 1; i <= 200; ++i) {
      const double v = e(x, 0.05 * i);
      CHECK(v >= prev);
      if (positive) CHECK(v > prev);
      positive = positive || v > 0.0;
      prev = v;
    }
  });
}

TEST_CASE("root certificates, homogeneity and subadditivity") {
  gen::for_seeds(30, 44, [](std::uint64_t seed) {
    const int n = 2 + static_cast<int>(seed % 2);
    const int m = 1 + static_cast<int>((seed >> 5) % 2);
    const PolytopeBody k = gen::polytope(seed, n);
    const OrliczFunction phi = gen::phi(seed + 7, m);
    CAPTURE(phi.name());
    const ProjectionBodyOracle o(k, phi);
    const HEvaluator& e = o.evaluator();
    Rng rng(seed);
    for (int i = 0; i < 20; ++i) {
      const Vec x = rng.normal_vector(n * m);
      const Vec y = rng.normal_vector(n * m);
      const SolveResult r = solve_support(e, x);
      CHECK(std::abs(e(x, 1.0 / r.h) - e.target()) <= 1e-10 * e.target());
      for (double c : {0.5, 2.0, 10.0}) CHECK(o.h(c * x) == doctest::Approx(c * o.h(x)).epsilon(1e-10));
      CHECK(o.h(x + y) <= o.h(x) + o.h(y) + 1e-9);
    }
  });
}

TEST_CASE("bisection and Brent agree") {
  gen::for_seeds(20, 45, [](std::uint64_t seed) {
    const int m = 1 + static_cast<int>(seed % 2);
    const PolytopeBody k = gen::polytope(seed, 3);
    const OrliczFunction phi = gen::phi(seed, m);
    const HEvaluator e = evaluator(k, phi);
    SolverSettings bis;
    bis.method = RootMethod::Bisection;
    Rng rng(seed);
    for (int i = 0; i < 10; ++i) {
      const Vec x = rng.unit_vector(3 * m);
      const SolveResult a = solve_support(e, x);
      const SolveResult b = solve_support(e, x, bis);
      CHECK(a.h == doctest::Approx(b.h).epsilon(1e-11));
      CHECK(b.residual <= 1e-10);
    }
  });
}

TEST_CASE("ball canonicalization matches the raw measure") {
  const SphereQuadrature nodes = make_quadrature(3, {QuadratureScheme::Product, 4096, 0, 16, 16});
  const SurfaceMeasure mu = surface_measure(BallBody(3, 1.0), &nodes);
  const SurfaceMeasure raw(mu.directions(), mu.weights(), mu.supports(), false);
  const double v = unit_ball_volume(3);
  for (int m : {1, 2}) {
    const OrliczFunction phi = OrliczFunction::composite(ScalarConvex::power(1.5), m == 1 ? QBody::unit_interval() : QBody::delta(2));
    const HEvaluator canon(mu, phi, {3, m}, v);
    const HEvaluator plain(raw, phi, {3, m}, v);
    CHECK(canon.canonicalizes());
    CHECK_FALSE(plain.canonicalizes());
    Rng rng(50 + m);
    for (int i = 0; i < 30; ++i) {
      const Vec x = rng.unit_vector(3 * m);
      // The node set is not exactly rotation invariant, so the two agree up
      // to the discretization of the measure.
      CHECK(solve_support(canon, x).h == doctest::Approx(solve_support(plain, x).h).epsilon(5e-3));
    }
  }
}

TEST_CASE("ball oracle is rotation invariant and matches the moment formula") {
  OracleSettings os;
  os.ball_measure = QuadratureSpec{QuadratureScheme::Product, 4096, 0, 16, 16};
  for (double p : {1.0, 2.0, 3.0}) {
    const ProjectionBodyOracle o(BallBody(3, 1.0), OrliczFunction::abs_power(p), os);
    const double c = std::pow(oracle::abs_moment(3, p) / (3.0 * oracle::ball_volume(3)), 1.0 / p);
    Rng rng(60);
    for (int i = 0; i < 20; ++i) {
      const Vec x = rng.unit_vector(3);
      CHECK(o.h(x) == doctest::Approx(c).epsilon(1e-4));
    }
  }
  const ProjectionBodyOracle o2(BallBody(2, 1.0), OrliczFunction::composite(ScalarConvex::power(2.0), QBody::delta(2)));
  Rng rng(61);
  for (int i = 0; i < 20; ++i) {
    const Vec x = rng.unit_vector(4);
    const Mat r = random_rotation(2, rng);
    const Vec rx = flatten(r * as_matrix(x, {2, 2}));
    CHECK(o2.h(rx) == doctest::Approx(o2.h(x)).epsilon(1e-6));
  }
}

TEST_CASE("oracle cache and statistics") {
  const ProjectionBodyOracle o(gen::triangle(), OrliczFunction::abs_power(2.0));
  const Vec x = point(0.6, 0.8);
  const double a = o.h(x);
  const double b = o.h(2.0 * x);
  CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-15));
  const OracleStats s = o.stats();
  CHECK(s.solves == 1);
  CHECK(s.cache_hits == 1);
  CHECK(s.certificate_failures == 0);
  CHECK(o.h(Vec::Zero(2)) == 0.0);
  CHECK_THROWS_AS(o.h(Vec::Zero(3)), Error);
}

TEST_CASE("certificate tally counts every solve") {
  reset_certificate_tally();
  const HEvaluator e = evaluator(gen::triangle(), OrliczFunction::squared_norm(1));
  Rng rng(62);
  for (int i = 0; i < 50; ++i) solve_support(e, rng.unit_vector(2));
  const CertificateTally t = certificate_tally();
  CHECK(t.calls == 50);
  CHECK(t.failures == 0);
  CHECK(t.worst_residual <= 1e-10);
}
