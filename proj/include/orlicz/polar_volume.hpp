#pragma once

#include <cstddef>

#include "orlicz/body.hpp"
#include "orlicz/projection_body.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

/// V_d(L*) = (1/d) int_{S^{d-1}} h_L(u)^{-d} du with its quadrature error.
/// Nodes are evaluated in parallel and reduced in node order, so the result
/// does not depend on the thread count. Throws NonPositiveSupport.
QuadratureEstimate polar_volume(const SupportOracle& h, const SphereQuadrature& quad, unsigned threads = 0);

struct GammaSettings {
  OracleSettings oracle;
  unsigned threads = 0;
};

struct GammaReport {
  double gamma = 0.0;
  double polar_volume = 0.0;
  double body_volume = 0.0;
  double quadrature_error = 0.0;  // error estimate of polar_volume
  /// Ball bodies only: Gamma change when the ball surface measure is
  /// coarsened to every other node, sampled on a few directions.
  double measure_error = 0.0;
  double gamma_error = 0.0;       // quadrature_error / body_volume^m + measure_error
  int n = 0;
  int m = 0;
  std::size_t nodes = 0;
  QuadratureScheme scheme = QuadratureScheme::Grid;
  OracleStats solver;
};

/// Gamma error from the ball measure discretization: the relative support
/// change on 8 seeded directions when the ball measure keeps every other atom,
/// times nm * gamma_value. Only meaningful for ball oracles.
double ball_measure_error(const ProjectionBodyOracle& oracle, double gamma_value);

/// Gamma_Phi(K) = V_{nm}(Pi_Phi^{m,*} K) / V_n(K)^m.
GammaReport gamma(const Body& body, const OrliczFunction& phi, const SphereQuadrature& quad,
                  const GammaSettings& settings = {});
GammaReport gamma(const ProjectionBodyOracle& oracle, const SphereQuadrature& quad, unsigned threads = 0);

}  // namespace orlicz
