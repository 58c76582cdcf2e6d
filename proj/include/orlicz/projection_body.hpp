#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "orlicz/body.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/surface_measure.hpp"

namespace orlicz {

/// H_x restricted to one direction x: H_x(t) = sum_k c_k Phi(t y_k) with
/// y_k = u_k^T X / h_k and c_k = h_k a_k. When Phi = phi o g the rows are
/// collapsed to the scalars g(y_k) and atoms with g = 0 are dropped.
struct DirectionProfile {
  const OrliczFunction* phi = nullptr;
  bool scalar = true;
  std::vector<double> values;  // g_k (scalar) or y_k rows (m values each)
  std::vector<double> coeffs;  // c_k

  double operator()(double t) const;
};

/// Evaluates H_x(t) = sum_i Phi(t u_i^T X / h_i) h_i a_i for the surface
/// measure of K; the root target is n V_n(K).
///
/// For rotation-invariant (ball) measures the direction is first reduced to
/// the canonical form X = Q [R; 0], R upper triangular with a nonnegative
/// diagonal; H_x depends only on R and the reduced measure is the marginal of
/// the ball measure on the first min(n, m) coordinates.
class HEvaluator {
 public:
  HEvaluator(SurfaceMeasure measure, OrliczFunction phi, MatrixShape shape, double volume);

  const MatrixShape& shape() const noexcept { return shape_; }
  double target() const noexcept { return target_; }
  const OrliczFunction& phi() const noexcept { return phi_; }
  const SurfaceMeasure& measure() const noexcept { return measure_; }
  bool canonicalizes() const noexcept { return measure_.rotation_invariant(); }

  /// Canonical representative of x: identity for polytopes, the [R; 0] form
  /// for ball measures (flattened at the original shape).
  Vec canonical(const Vec& x) const;
  DirectionProfile profile(const Vec& x) const;

  /// H_x(t).
  double operator()(const Vec& x, double t) const { return profile(x)(t); }

 private:
  SurfaceMeasure measure_;
  SurfaceMeasure reduced_;  // marginal used for canonical directions
  OrliczFunction phi_;
  MatrixShape shape_;
  double target_;
};

double h_eval_raw(const HEvaluator& e, const Vec& x, double t);

enum class RootMethod { Bisection, Brent };

struct SolverSettings {
  double rel_tol = 1e-12;         // relative width of the final t bracket
  int max_iter = 500;
  RootMethod method = RootMethod::Brent;
  double certificate_tol = 1e-10; // |H(1/h) - target| <= tol * target
};

struct SolveResult {
  double h = 0.0;          // support value 1/t0
  double t = 0.0;
  int iterations = 0;      // function evaluations after bracketing
  int bracket_steps = 0;   // doublings/halvings spent finding the bracket
  double residual = 0.0;   // |H(t) - target| / target
};

/// Solves H_x(t) = n V_n(K) and returns h = 1/t. The bracket comes from
/// convexity (H(t) >= t H(1) for t >= 1, <= for t <= 1) with doubling/halving
/// as a fallback; the cap is 2^200. Throws NoBracket or NonFinite.
SolveResult solve_support(const HEvaluator& e, const Vec& x, const SolverSettings& settings = {});

/// Process-wide record of every solve_support call, checked against each
/// call's certificate tolerance.
struct CertificateTally {
  std::uint64_t calls = 0;
  std::uint64_t failures = 0;
  double worst_residual = 0.0;
};
CertificateTally certificate_tally();
void reset_certificate_tally();

struct OracleSettings {
  SolverSettings solver;
  /// Node set for ball surface measures; default_ball_measure_spec when empty.
  std::optional<QuadratureSpec> ball_measure;
  std::size_t cache_capacity = std::size_t{1} << 18;
};

struct OracleStats {
  std::uint64_t solves = 0;
  std::uint64_t cache_hits = 0;
  int max_iterations = 0;
  double worst_residual = 0.0;
  std::uint64_t certificate_failures = 0;
};

/// Support oracle of the projection body Pi_Phi^m K in R^{nm}. h() is safe to
/// call from many threads; results are memoized per normalized direction
/// rounded to 12 digits.
class ProjectionBodyOracle {
 public:
  ProjectionBodyOracle(const Body& body, OrliczFunction phi, OracleSettings settings = {});

  const MatrixShape& shape() const noexcept { return evaluator_->shape(); }
  const HEvaluator& evaluator() const noexcept { return *evaluator_; }
  double body_volume() const noexcept { return volume_; }

  double h(const Vec& x) const;
  double operator()(const Vec& x) const { return h(x); }

  OracleStats stats() const;
  void reset_stats();

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<long long>& key) const noexcept;
  };

  std::shared_ptr<HEvaluator> evaluator_;
  OracleSettings settings_;
  double volume_ = 0.0;

  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<std::vector<long long>, double, KeyHash> cache_;

  mutable std::mutex stats_mutex_;
  mutable OracleStats stats_;
};

/// Support of Pi_{phi,Q}^m K for phi(t) = t^p without root finding:
/// (sum_i h_Q(u_i^T X)^p h_i^{1-p} a_i / (n V_n(K)))^{1/p}.
double lp_closed_form(const PolytopeBody& body, const QBody& q, double p, const Vec& x);

}  // namespace orlicz
