#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/body.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

/// Discrete surface area measure: atoms (u_i, a_i, h_i) with u_i unit,
/// a_i > 0 and h_i = h_K(u_i). Directions are the columns of an n x N matrix.
///
/// For a ball of radius r the atoms are quadrature nodes with weight
/// w_k r^{n-1} and support r; such a measure is flagged rotation invariant.
class SurfaceMeasure {
 public:
  SurfaceMeasure() = default;
  SurfaceMeasure(Mat directions, std::vector<double> weights, std::vector<double> supports, bool rotation_invariant);

  int dim() const noexcept { return static_cast<int>(directions_.rows()); }
  std::size_t size() const noexcept { return weights_.size(); }
  const Mat& directions() const noexcept { return directions_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& supports() const noexcept { return supports_; }
  bool rotation_invariant() const noexcept { return rotation_invariant_; }

  double total_mass() const;
  /// (1/n) sum h_i a_i, which equals V_n(K).
  double cone_volume() const;
  Vec centroid() const;

  /// Pushes the atoms forward under u -> (u_1, ..., u_r) and merges atoms that
  /// land on the same point. Only meaningful for rotation-invariant measures
  /// with a constant support, where it is used to shrink the inner sums.
  SurfaceMeasure marginal(int r) const;

 private:
  Mat directions_;
  std::vector<double> weights_;
  std::vector<double> supports_;
  bool rotation_invariant_ = false;
};

/// Builds S_K. Polytopes give one atom per facet; balls need a quadrature on
/// S^{n-1} (MissingQuadrature otherwise).
SurfaceMeasure surface_measure(const Body& body, const SphereQuadrature* ball_nodes = nullptr);

struct MeasureDiagnostics {
  double total_mass = 0.0;
  double centroid_norm = 0.0;
  double cone_volume = 0.0;
  double min_hemisphere_mass = 0.0;  // smallest sum of a_i over u_i . w > 0
  bool concentrated = false;         // some sampled hemisphere carries no mass
  std::vector<std::string> warnings;
};

/// Sampled invariant checks. A mass-free open hemisphere is reported as a
/// warning, never thrown.
MeasureDiagnostics check_measure(const SurfaceMeasure& measure, int hemisphere_samples = 1000,
                                 std::uint64_t seed = 0);

}  // namespace orlicz
