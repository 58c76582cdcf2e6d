#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "orlicz/linalg.hpp"

namespace orlicz {

enum class QuadratureScheme {
  Grid,            // d = 2: equally spaced angles
  MonteCarlo,      // seeded normalized Gaussians
  LowDiscrepancy,  // randomly shifted Halton replicas through the inverse Gaussian
  Product,         // d = 3: Gauss-Legendre in the polar angle x uniform azimuth
};

std::string to_string(QuadratureScheme scheme);
QuadratureScheme parse_scheme(const std::string& name);

struct QuadratureSpec {
  QuadratureScheme scheme = QuadratureScheme::Grid;
  std::size_t nodes = 8192;
  std::uint64_t seed = 0;
  int replicas = 16;      // LowDiscrepancy only
  int polar_nodes = 16;   // Product only
};

/// A quadrature estimate together with its error estimate. The estimate is
/// a refinement delta for Grid/Product, the sample standard error for
/// MonteCarlo, and the standard error across shifted replicas for
/// LowDiscrepancy.
struct QuadratureEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Nodes and weights on S^{d-1}. Nodes are stored column-wise in a d x N
/// matrix; weights sum to the area of S^{d-1}.
class SphereQuadrature {
 public:
  SphereQuadrature() = default;
  SphereQuadrature(int dim, Mat nodes, std::vector<double> weights, QuadratureSpec spec);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  const Mat& nodes() const noexcept { return nodes_; }
  Vec node(std::size_t k) const { return nodes_.col(static_cast<Eigen::Index>(k)); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const QuadratureSpec& spec() const noexcept { return spec_; }

  /// Integral of sampled values f(u_k) against the node weights.
  QuadratureEstimate integrate(const std::vector<double>& values) const;

 private:
  int dim_ = 0;
  Mat nodes_;
  std::vector<double> weights_;
  QuadratureSpec spec_;
};

/// Builds a quadrature on S^{d-1}. Throws InvalidScheme for d < 2, N < 64, a
/// Grid outside d = 2, or a Product rule outside d = 3.
SphereQuadrature make_quadrature(int d, const QuadratureSpec& spec);

/// Default node set per sphere dimension: d=2 grid 8192, d=3,4 low
/// discrepancy 2e5, d>=5 low discrepancy 1e6.
QuadratureSpec default_quadrature_spec(int d, std::uint64_t seed = 0);

/// Default node set for ball surface measures in R^n.
QuadratureSpec default_ball_measure_spec(int n, std::uint64_t seed = 0);

}  // namespace orlicz
