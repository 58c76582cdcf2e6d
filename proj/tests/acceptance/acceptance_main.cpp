// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Runs at the default node counts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "orlicz/harness.hpp"
#include "orlicz/random.hpp"
#include "orlicz/symmetrization.hpp"

using namespace orlicz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Counts {
  int pass = 0, fail = 0, inconclusive = 0;
  void add(Verdict v) {
    if (v == Verdict::Pass) ++pass;
    else if (v == Verdict::Fail) ++fail;
    else ++inconclusive;
  }
};

Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

PolytopeBody triangle() { return PolytopeBody::from_vertices({vec2(-1, -1), vec2(2, -1), vec2(-1, 1)}); }

PolytopeBody random_body(int n, std::uint64_t seed) {
  Rng rng(seed);
  const int k = n == 2 ? 4 + static_cast<int>(rng.next() % 8) : 6 + static_cast<int>(rng.next() % 14);
  return random_polytope(n, k, derive_seed(seed, 1));
}

std::vector<OrliczFunction> petty_family(int m) {
  return {OrliczFunction::abs_power(1.0, m),
          OrliczFunction::abs_power(2.0, m),
          OrliczFunction::pos_part_power(2.0, m),
          OrliczFunction::squared_norm(m),
          OrliczFunction::composite(ScalarConvex::power(1.0), QBody::delta(m)),
          OrliczFunction::composite(ScalarConvex::power(2.0), QBody::delta(m))};
}

OrliczFunction random_phi(Rng& rng, int m) {
  auto family = petty_family(m);
  family.push_back(OrliczFunction::abs_power(rng.uniform(1.0, 3.0), m));
  return family[rng.next() % family.size()];
}

Outcome oracle_equivalence() {
  const VerdictRecord r = verify_oracle_equivalence(default_settings(2, 1, 1), {});
  return {r.verdict == Verdict::Pass, fmt("%zu cases x 1000 directions, worst relative %.2e (tol 1e-8)",
                                          r.quantities["cases"].size(), r.quantities["worst_relative"].get<double>())};
}

Outcome closed_forms() {
  const SphereQuadrature grid = make_quadrature(2, default_quadrature_spec(2));
  const PolytopeBody square = named_body("square", 2);
  const double sq = gamma(square, OrliczFunction::abs_power(1.0), grid).gamma;
  const double disc = gamma(BallBody(2, 1.0), OrliczFunction::abs_power(1.0), grid).gamma;
  const double pos = gamma(square, OrliczFunction::pos_part_power(1.0), grid).polar_volume;
  const double ref_disc = std::numbers::pi * std::numbers::pi / 4.0;
  const double e1 = std::abs(sq - 2.0) / 2.0, e2 = std::abs(disc - ref_disc) / ref_disc, e3 = std::abs(pos - 32.0) / 32.0;
  return {std::max({e1, e2, e3}) <= 5e-3,
          fmt("square %.6f, disc %.6f (pi^2/4 %.6f), z+ square polar %.4f", sq, disc, ref_disc, pos)};
}

Outcome petty() {
  const std::vector<std::pair<int, int>> configs{{2, 1}, {2, 2}, {3, 1}, {3, 2}};
  Counts total;
  int unexplained = 0;
  std::string per;
  for (auto [n, m] : configs) {
    std::vector<Body> bodies;
    for (int i = 0; i < 50; ++i) bodies.push_back(random_body(n, derive_seed(1000 + 10 * n + m, i)));
    const HarnessSettings s = default_settings(n, m, 3);
    Counts c;
    for (const auto& phi : petty_family(m)) {
      const VerdictRecord r = verify_petty(bodies, phi, s);
      const auto& margins = r.quantities["margins"];
      const auto& budgets = r.errors["budgets"];
      for (std::size_t i = 0; i < margins.size(); ++i) {
        const Verdict v = classify_margin(margins[i].get<double>(), budgets[i].get<double>());
        c.add(v);
        total.add(v);
        if (v == Verdict::Inconclusive && !(std::abs(margins[i].get<double>()) <= budgets[i].get<double>())) {
          ++unexplained;
        }
      }
    }
    per += fmt(" (%d,%d): %d/%d/%d", n, m, c.pass, c.inconclusive, c.fail);
  }
  return {total.fail == 0 && unexplained == 0,
          fmt("%d trials, pass/inconclusive/fail by (n,m):", total.pass + total.fail + total.inconclusive) + per};
}

Outcome affine() {
  struct Case {
    PolytopeBody body;
    OrliczFunction phi;
  };
  const std::vector<Case> cases{
      {named_body("square", 2), OrliczFunction::abs_power(1.0)},
      {triangle(), OrliczFunction::pos_part_power(1.0)},
      {triangle(), OrliczFunction::composite(ScalarConvex::power(1.0), QBody::delta(2))},
      {random_body(3, 77), OrliczFunction::abs_power(2.0)},
      {random_body(3, 78), OrliczFunction::composite(ScalarConvex::power(2.0), QBody::delta(2))},
  };
  double worst_support = 0.0, worst_gamma_ratio = 0.0;
  int failures = 0, pairs = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    Rng rng(derive_seed(40, c));
    const int n = cases[c].body.dim();
    for (int j = 0; j < 10; ++j) {
      HarnessSettings s = default_settings(n, cases[c].phi.m(), derive_seed(41, 100 * c + j));
      const VerdictRecord r = verify_affine_invariance(cases[c].body, cases[c].phi, random_unimodular(n, rng), s, 20);
      pairs += 20;
      failures += r.verdict != Verdict::Pass;
      worst_support = std::max(worst_support, r.quantities["support_worst_relative"].get<double>());
      worst_gamma_ratio = std::max(worst_gamma_ratio, r.quantities["gamma_difference"].get<double>() /
                                                          (r.errors["budget"].get<double>() / 3.0));
    }
  }
  return {failures == 0, fmt("%d (A, x) pairs over %zu body/Phi cases, worst support relative %.2e, worst "
                             "Gamma difference %.2f x combined error, %d failing matrices",
                             pairs, cases.size(), worst_support, worst_gamma_ratio, failures)};
}

Outcome inclusion() {
  std::size_t samples = 0, violations = 0;
  double worst = -INFINITY;
  int triples = 0;
  for (int n : {2, 3}) {
    for (int t = 0; t < 20; ++t) {
      Rng rng(derive_seed(50 + n, t));
      const PolytopeBody body = random_body(n, derive_seed(51 + n, t));
      const int m = 1 + static_cast<int>(rng.next() % 2);
      const OrliczFunction phi = random_phi(rng, m);
      const InclusionReport r = check_inclusion(body, phi, rng.unit_vector(n), 50, 50, derive_seed(52 + n, t));
      samples += r.samples;
      violations += r.violations;
      worst = std::max(worst, r.worst_excess);
      ++triples;
    }
  }
  return {violations == 0 && samples >= 40u * 2500u,
          fmt("%d triples, %zu symmetral points, %zu violations, worst excess %.2e (tol 1e-7)", triples, samples,
              violations, worst)};
}

Outcome steiner_monotonicity() {
  Counts c;
  double worst = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 2;
    const int m = 1 + (i / 2) % 2;
    Rng rng(derive_seed(60, i));
    const PolytopeBody body = random_body(n, derive_seed(61, i));
    const OrliczFunction phi = random_phi(rng, m);
    const VerdictRecord r = verify_steiner_monotonicity(body, rng.unit_vector(n), phi, default_settings(n, m, i));
    c.add(r.verdict);
    worst = std::min(worst, r.quantities["margin"].get<double>() / r.errors["budget"].get<double>());
  }
  return {c.fail == 0, fmt("100 cases: %d pass, %d inconclusive, %d fail; smallest margin/budget %.2f", c.pass,
                           c.inconclusive, c.fail, worst)};
}

Outcome volume_preservation() {
  double worst_step = 0.0, worst_total = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 2;
    Rng rng(derive_seed(70, i));
    const PolytopeBody k = random_body(n, derive_seed(71, i));
    const PolytopeBody s = steiner(k, rng.unit_vector(n));
    worst_step = std::max(worst_step, std::abs(s.volume() - k.volume()) / k.volume());
  }
  SteinerOptions so;
  so.simplify = true;
  for (const PolytopeBody& start : {triangle(), random_body(3, 72)}) {
    const SteinerTrajectory t = iterate_steiner(start, {DirectionSequence::Kind::Random, 73, {}}, 200, so);
    for (const auto& step : t.steps) worst_step = std::max(worst_step, step.step_volume_drift);
    const double v0 = t.steps.front().volume;
    worst_total = std::max(worst_total, std::abs(t.steps.back().volume - v0) / v0);
  }
  return {worst_step <= 1e-9 && worst_total <= 1e-6,
          fmt("worst step drift %.2e (tol 1e-9), worst 200-step total drift %.2e (tol 1e-6)", worst_step,
              worst_total)};
}

Outcome trajectory() {
  std::vector<TrajectoryRow> rows;
  const VerdictRecord r = verify_trajectory(triangle(), {DirectionSequence::Kind::Random, 11, {}},
                                            OrliczFunction::abs_power(1.0), default_settings(2, 1, 11), {}, &rows);
  const auto& q = r.quantities;
  return {r.verdict == Verdict::Pass,
          fmt("final Hausdorff %.2e c (tol 0.05 c), Gamma %.4f -> %.4f, Steiner steps pass/inconclusive/fail "
              "%d/%d/%d",
              q["final_hausdorff_relative"].get<double>(), q["gamma_initial"].get<double>(),
              q["gamma_final"].get<double>(), q["gamma_steps"]["pass"].get<int>(),
              q["gamma_steps"]["inconclusive"].get<int>(), q["gamma_steps"]["fail"].get<int>())};
}

Outcome continuity() {
  const LadderOptions lo;
  std::vector<VerdictRecord> rs;
  rs.push_back(verify_continuity_in_K(named_body("square", 2), OrliczFunction::abs_power(1.0), default_settings(2, 1, 9), lo));
  rs.push_back(verify_continuity_in_K(random_body(3, 90), OrliczFunction::composite(ScalarConvex::power(1.0), QBody::delta(2)),
                                      default_settings(3, 2, 9), lo));
  rs.push_back(verify_continuity_in_phi(named_body("square", 2), OrliczFunction::abs_power(2.0), default_settings(2, 1, 9), lo));
  rs.push_back(verify_continuity_in_phi(random_body(3, 91),
                                        OrliczFunction::composite(ScalarConvex::power(1.5), QBody::delta(2)),
                                        default_settings(3, 2, 9), lo));
  rs.push_back(verify_continuity_in_phi(Body{BallBody(2, 1.0)}, OrliczFunction::pos_part_power(2.0), default_settings(2, 1, 9), lo));
  bool ok = true;
  double worst = 0.0;
  for (const auto& r : rs) {
    ok = ok && r.verdict == Verdict::Pass;
    worst = std::max(worst, r.quantities["final_distance"].get<double>());
  }
  return {ok, fmt("%zu ladders (K and Phi), worst final distance %.2e at eps 2^-%d", rs.size(), worst, lo.steps)};
}

Outcome strictness() {
  const QBody sym = QBody::from_vertices({Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)});
  const std::vector<OrliczFunction> phis{
      OrliczFunction::squared_norm(1), OrliczFunction::squared_norm(2),
      OrliczFunction::composite(ScalarConvex::power(2.0), QBody::delta(1)),
      OrliczFunction::composite(ScalarConvex::power(2.0), QBody::delta(2)),
      OrliczFunction::composite(ScalarConvex::exp_minus_one(), sym)};
  int total = 0, passed = 0;
  double worst = INFINITY;
  for (int n : {2, 3}) {
    for (const PolytopeBody& k : {named_body(n == 2 ? "square" : "cube", n), named_body("simplex", n)}) {
      for (const auto& phi : phis) {
        const VerdictRecord r = verify_strictness(k, phi, default_settings(n, phi.m(), 5));
        ++total;
        passed += r.verdict == Verdict::Pass;
        worst = std::min(worst, r.quantities["gap"].get<double>() / r.errors["budget"].get<double>());
      }
    }
  }
  return {passed == total, fmt("%d/%d cases with Gamma(B) - Gamma(K) beyond 3x budget, smallest gap/budget %.1f",
                               passed, total, worst)};
}

Outcome certificates() {
  const CertificateTally t = certificate_tally();
  return {t.failures == 0 && t.calls > 0,
          fmt("%llu solves, %llu certificate failures, worst residual %.2e (tol 1e-10)",
              static_cast<unsigned long long>(t.calls), static_cast<unsigned long long>(t.failures),
              t.worst_residual)};
}

void report(int id, const char* name, const Outcome& o, double seconds) {
  std::printf("%s %2d %-24s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds);
  std::fflush(stdout);
}

}  // namespace

int main() {
  reset_certificate_tally();
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "oracle-equivalence", oracle_equivalence},
      {2, "closed-forms", closed_forms},
      {3, "petty-inequality", petty},
      {4, "affine-invariance", affine},
      {5, "symmetral-inclusion", inclusion},
      {6, "steiner-monotonicity", steiner_monotonicity},
      {7, "volume-preservation", volume_preservation},
      {8, "ball-convergence", trajectory},
      {9, "continuity", continuity},
      {11, "strictness", strictness},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Strictness runs before the certificate tally is read so that the
    // tally covers every suite; its line is printed after criterion 10.
    if (c.id == 11) {
      const Outcome cert = certificates();
      report(10, "root-certificates", cert, 0.0);
      all = all && cert.pass;
    }
    report(c.id, c.name, o, seconds);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
