#include "orlicz/polar_volume.hpp"

#include <cmath>
#include <string>

#include "orlicz/parallel.hpp"
#include "orlicz/random.hpp"

namespace orlicz {

// Relative support error of a discretized ball measure, estimated against
// the half-resolution measure (even-indexed atoms with doubled weight). The
// Gamma error follows from Gamma ~ h^{-nm}.
double ball_measure_error(const ProjectionBodyOracle& oracle, double gamma_value) {
  const HEvaluator& fine = oracle.evaluator();
  const SurfaceMeasure& mu = fine.measure();
  const std::size_t count = (mu.size() + 1) / 2;
  Mat dirs(mu.dim(), static_cast<Eigen::Index>(count));
  std::vector<double> weights, supports;
  for (std::size_t k = 0, j = 0; k < mu.size(); k += 2, ++j) {
    dirs.col(static_cast<Eigen::Index>(j)) = mu.directions().col(static_cast<Eigen::Index>(k));
    weights.push_back(2.0 * mu.weights()[k]);
    supports.push_back(mu.supports()[k]);
  }
  const MatrixShape shape = fine.shape();
  const HEvaluator coarse(SurfaceMeasure(std::move(dirs), std::move(weights), std::move(supports), true), fine.phi(),
                          shape, fine.target() / shape.n);
  Rng rng(0x6a09e667f3bcc909ULL);
  double worst = 0.0;
  for (int s = 0; s < 8; ++s) {
    const Vec x = rng.unit_vector(shape.dim());
    const double hf = solve_support(fine, x).h;
    const double hc = solve_support(coarse, x).h;
    worst = std::max(worst, std::abs(hf - hc) / hf);
  }
  return shape.dim() * worst * gamma_value;
}

QuadratureEstimate polar_volume(const SupportOracle& h, const SphereQuadrature& quad, unsigned threads) {
  const int d = quad.dim();
  std::vector<double> values(quad.size());
  parallel_for(quad.size(), resolve_threads(threads), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double hk = h(quad.node(k));
      if (!(hk > 0.0) || !std::isfinite(hk)) {
        fail(ErrorCode::NonPositiveSupport, "support value " + std::to_string(hk) + " at quadrature node");
      }
      values[k] = std::pow(hk, -d) / d;
    }
  });
  return quad.integrate(values);
}

GammaReport gamma(const ProjectionBodyOracle& oracle, const SphereQuadrature& quad, unsigned threads) {
  const MatrixShape shape = oracle.shape();
  if (quad.dim() != shape.dim()) fail(ErrorCode::ShapeMismatch, "quadrature dimension must be n*m");
  const QuadratureEstimate pv = polar_volume([&](const Vec& x) { return oracle.h(x); }, quad, threads);
  GammaReport r;
  r.n = shape.n;
  r.m = shape.m;
  r.polar_volume = pv.value;
  r.quadrature_error = pv.error;
  r.body_volume = oracle.body_volume();
  const double denom = std::pow(r.body_volume, shape.m);
  r.gamma = pv.value / denom;
  if (oracle.evaluator().canonicalizes()) r.measure_error = ball_measure_error(oracle, r.gamma);
  r.gamma_error = pv.error / denom + r.measure_error;
  r.nodes = quad.size();
  r.scheme = quad.spec().scheme;
  r.solver = oracle.stats();
  return r;
}

GammaReport gamma(const Body& body, const OrliczFunction& phi, const SphereQuadrature& quad,
                  const GammaSettings& settings) {
  const ProjectionBodyOracle oracle(body, phi, settings.oracle);
  return gamma(oracle, quad, settings.threads);
}

}  // namespace orlicz
