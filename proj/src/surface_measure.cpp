#include "orlicz/surface_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "orlicz/random.hpp"

namespace orlicz {

SurfaceMeasure::SurfaceMeasure(Mat directions, std::vector<double> weights, std::vector<double> supports,
                               bool rotation_invariant)
    : directions_(std::move(directions)),
      weights_(std::move(weights)),
      supports_(std::move(supports)),
      rotation_invariant_(rotation_invariant) {
  if (static_cast<std::size_t>(directions_.cols()) != weights_.size() || weights_.size() != supports_.size()) {
    fail(ErrorCode::ShapeMismatch, "surface measure arrays differ in length");
  }
}

double SurfaceMeasure::total_mass() const { return pairwise_sum(weights_); }

double SurfaceMeasure::cone_volume() const {
  std::vector<double> terms(size());
  for (std::size_t i = 0; i < size(); ++i) terms[i] = supports_[i] * weights_[i];
  return pairwise_sum(terms) / dim();
}

Vec SurfaceMeasure::centroid() const {
  Vec c = Vec::Zero(dim());
  for (std::size_t i = 0; i < size(); ++i) c += weights_[i] * directions_.col(static_cast<Eigen::Index>(i));
  return c;
}

SurfaceMeasure SurfaceMeasure::marginal(int r) const {
  if (r < 1 || r > dim()) fail(ErrorCode::ShapeMismatch, "marginal rank out of range");
  // Atoms are bucketed on a 1e-12 lattice; rare lattice-boundary splits only
  // leave two atoms unmerged, which does not change the measure.
  std::map<std::vector<long long>, std::size_t> slot;
  std::vector<Vec> dirs;
  std::vector<double> weights, supports;
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec p = directions_.col(static_cast<Eigen::Index>(i)).head(r);
    std::vector<long long> key(r + 1);
    for (int j = 0; j < r; ++j) key[j] = std::llround(p[j] * 1e12);
    key[r] = std::llround(supports_[i] * 1e12);
    auto [it, fresh] = slot.emplace(key, dirs.size());
    if (fresh) {
      dirs.push_back(p);
      weights.push_back(weights_[i]);
      supports.push_back(supports_[i]);
    } else {
      weights[it->second] += weights_[i];
    }
  }
  Mat d(r, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) d.col(static_cast<Eigen::Index>(k)) = dirs[k];
  return SurfaceMeasure(std::move(d), std::move(weights), std::move(supports), rotation_invariant_);
}

SurfaceMeasure surface_measure(const Body& body, const SphereQuadrature* ball_nodes) {
  if (const auto* poly = std::get_if<PolytopeBody>(&body)) {
    const auto& facets = poly->facets();
    Mat dirs(poly->dim(), static_cast<Eigen::Index>(facets.size()));
    std::vector<double> weights, supports;
    for (std::size_t i = 0; i < facets.size(); ++i) {
      dirs.col(static_cast<Eigen::Index>(i)) = facets[i].normal;
      weights.push_back(facets[i].area);
      supports.push_back(facets[i].support);
    }
    return SurfaceMeasure(std::move(dirs), std::move(weights), std::move(supports), false);
  }
  const auto& ball = std::get<BallBody>(body);
  if (ball_nodes == nullptr) fail(ErrorCode::MissingQuadrature, "ball surface measure needs a sphere quadrature");
  if (ball_nodes->dim() != ball.dim()) fail(ErrorCode::ShapeMismatch, "ball quadrature on the wrong sphere");
  const double scale = std::pow(ball.radius(), ball.dim() - 1);
  std::vector<double> weights(ball_nodes->weights());
  for (auto& w : weights) w *= scale;
  return SurfaceMeasure(ball_nodes->nodes(), std::move(weights), std::vector<double>(weights.size(), ball.radius()),
                        true);
}

MeasureDiagnostics check_measure(const SurfaceMeasure& measure, int hemisphere_samples, std::uint64_t seed) {
  MeasureDiagnostics diag;
  diag.total_mass = measure.total_mass();
  diag.centroid_norm = measure.centroid().norm();
  diag.cone_volume = measure.cone_volume();
  diag.min_hemisphere_mass = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (int s = 0; s < hemisphere_samples; ++s) {
    const Vec w = rng.unit_vector(measure.dim());
    const Eigen::VectorXd dots = measure.directions().transpose() * w;
    double mass = 0.0;
    for (std::size_t i = 0; i < measure.size(); ++i)
      if (dots[static_cast<Eigen::Index>(i)] > 0) mass += measure.weights()[i];
    diag.min_hemisphere_mass = std::min(diag.min_hemisphere_mass, mass);
  }
  if (diag.min_hemisphere_mass <= 0.0) {
    diag.concentrated = true;
    diag.warnings.push_back("surface measure vanishes on a sampled open hemisphere");
  }
  if (diag.centroid_norm > 1e-9 * diag.total_mass) {
    diag.warnings.push_back("surface measure centroid is not at the origin");
  }
  return diag;
}

}  // namespace orlicz
