#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/config.hpp"
#include "orlicz/polar_volume.hpp"
#include "orlicz/projection_body.hpp"
#include "orlicz/symmetrization.hpp"

namespace orlicz {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);
/// Fail dominates Inconclusive, which dominates Pass.
Verdict worst_of(Verdict a, Verdict b);

/// Inequality claim "margin >= 0" under an error budget: pass when the margin
/// clears the budget, fail when it is below -budget, inconclusive otherwise.
Verdict classify_margin(double margin, double budget);

/// Solver statistics that do not depend on the thread count.
Json to_json(const OracleStats& stats);

struct VerdictRecord {
  std::string experiment;
  Verdict verdict = Verdict::Pass;
  Json quantities = Json::object();
  Json errors = Json::object();
  Json provenance = Json::object();

  Json to_json() const;
};

struct HarnessSettings {
  QuadratureSpec polar;                     // on S^{nm-1}
  std::optional<QuadratureSpec> ball;       // ball surface measure on S^{n-1}
  Tolerances tol;
  unsigned threads = 0;
  std::uint64_t seed = 0;
};

/// Settings with the default node sets for (n, m).
HarnessSettings default_settings(int n, int m, std::uint64_t seed = 0);

/// Gamma of an SL(n) image of the ball, through h_{Pi(A B)}(x) = h_{Pi B}(A^{-1} X).
GammaReport gamma_ellipsoid(const Mat& a, const OrliczFunction& phi, const HarnessSettings& settings);

/// Gamma_Phi(K) <= Gamma_Phi(B) for every body, with the ball value computed
/// once. A margin inside the budget is inconclusive and flagged as consistent
/// with equality.
VerdictRecord verify_petty(const std::vector<Body>& bodies, const OrliczFunction& phi, const HarnessSettings& settings);

/// Support identity h_{Pi(A K)}(x) = h_{Pi K}(A^{-1} X) on random x, and
/// |Gamma(A K) - Gamma(K)| within the invariance budget. Throws NotUnimodular.
VerdictRecord verify_affine_invariance(const PolytopeBody& body, const OrliczFunction& phi, const Mat& a,
                                       const HarnessSettings& settings, int samples = 200);

struct LadderOptions {
  int steps = 14;             // eps_j = 2^-j, j = 1..steps
  int directions = 400;       // sampled points of S^{nm-1}
  int monotone_tail = 6;      // strictly decreasing over the last steps
  double final_tol = 1e-3;
};

/// Sup-distance of h_{Pi K_j} to h_{Pi K_0} for vertex perturbations of size
/// eps_j along fixed seeded unit vectors.
VerdictRecord verify_continuity_in_K(const PolytopeBody& base, const OrliczFunction& phi,
                                     const HarnessSettings& settings, const LadderOptions& options = {});

/// Phi_eps converging to Phi_0 as eps -> 0: exponent p0 + eps for the power
/// kinds and power profiles, slopes scaled by 1 + eps for max_affine.
std::function<OrliczFunction(double)> phi_family(const OrliczFunction& phi0);

VerdictRecord verify_continuity_in_phi(const Body& body, const OrliczFunction& phi0, const HarnessSettings& settings,
                                       const LadderOptions& options = {});

/// Gamma(B) - Gamma(K) > budget for strictly convex Phi (or a composite with
/// strictly convex profile). Throws InvalidSpec otherwise.
VerdictRecord verify_strictness(const Body& body, const OrliczFunction& phi, const HarnessSettings& settings);

/// Gamma(K) <= Gamma(S_v K) within budget.
VerdictRecord verify_steiner_monotonicity(const PolytopeBody& body, const Vec& v, const OrliczFunction& phi,
                                          const HarnessSettings& settings);

VerdictRecord verify_inclusion(const PolytopeBody& body, const OrliczFunction& phi, const Vec& v, int bases, int rays,
                               const HarnessSettings& settings);

struct TrajectoryOptions {
  int iterations = 200;
  SteinerOptions steiner{true, 256, true};
  double convergence_tol = 0.05;     // final Hausdorff distance / c
  double window_slack = 1e-3;        // per-window Hausdorff slack / c
  bool track_gamma = true;
};

struct TrajectoryRow {
  int iteration = 0;
  double hausdorff_to_ball = 0.0;
  double gamma = 0.0;
  double gamma_error = 0.0;
  double gamma_raw = 0.0;  // Gamma(S_v K_{j-1}) before simplification/re-centering
  double gamma_raw_error = 0.0;
  double step_volume_drift = 0.0;
  double volume = 0.0;
  std::size_t vertices = 0;
};

/// Iterated Steiner symmetrization with the per-iteration table. Checks
/// convergence to the volume-matched ball, windowed Hausdorff monotonicity,
/// Gamma(K_{j-1}) <= Gamma(S_v K_{j-1}) within budget at every step and the
/// per-step volume drift.
VerdictRecord verify_trajectory(const PolytopeBody& body, const DirectionSequence& directions,
                                const OrliczFunction& phi, const HarnessSettings& settings,
                                const TrajectoryOptions& options, std::vector<TrajectoryRow>* rows = nullptr);

struct OracleSuiteOptions {
  std::vector<double> exponents{1.0, 1.5, 2.0, 3.0};
  int directions = 1000;
};

/// solve_support against lp_closed_form for phi = t^p, Q in {[0,1], Delta_2}
/// and bodies square, triangle, random 3-d polytope.
VerdictRecord verify_oracle_equivalence(const HarnessSettings& settings, const OracleSuiteOptions& options = {});

}  // namespace orlicz
