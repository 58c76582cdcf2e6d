#pragma once

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "orlicz/linalg.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

/// One facet of a polytope: outward unit normal u, (n-1)-area a and support
/// value h = h_K(u).
struct Facet {
  Vec normal;
  double area = 0.0;
  double support = 0.0;
  std::vector<int> vertices;  // indices into PolytopeBody::vertices()
};

/// Convex polytope in R^n with the origin strictly inside. Immutable once
/// built; all geometry is double precision.
class PolytopeBody {
 public:
  /// Hull of the points. Duplicate and interior points are dropped. Throws
  /// DegenerateHull for affinely dependent input and OriginNotInterior when
  /// some facet has support <= 1e-12.
  static PolytopeBody from_vertices(const std::vector<Vec>& points);

  int dim() const noexcept { return n_; }
  MatrixShape shape() const { return {n_, 1}; }
  const std::vector<Vec>& vertices() const noexcept { return vertices_; }
  const std::vector<Facet>& facets() const noexcept { return facets_; }
  double volume() const noexcept { return volume_; }
  const Vec& centroid() const noexcept { return centroid_; }

  double support(const Vec& x) const;

  /// Image under a linear map (hull is rebuilt).
  PolytopeBody transformed(const Mat& a) const;
  PolytopeBody translated(const Vec& t) const;
  PolytopeBody scaled(double c) const;

  /// Vertex index pairs forming the 1-skeleton (n = 2 or 3).
  std::vector<std::pair<int, int>> edges() const;

 private:
  int n_ = 0;
  std::vector<Vec> vertices_;
  std::vector<Facet> facets_;
  double volume_ = 0.0;
  Vec centroid_;
};

/// Centered Euclidean ball of the given radius.
class BallBody {
 public:
  BallBody(int n, double radius);

  int dim() const noexcept { return n_; }
  MatrixShape shape() const { return {n_, 1}; }
  double radius() const noexcept { return radius_; }
  double volume() const;
  double support(const Vec& x) const { return radius_ * x.norm(); }

 private:
  int n_;
  double radius_;
};

using Body = std::variant<PolytopeBody, BallBody>;

int dimension(const Body& body);
double volume(const Body& body);

/// h_K(x) = max{x . y : y in K}. Positively 1-homogeneous. Throws ShapeMismatch.
double support_value(const Body& body, const Vec& x);

/// Largest support gap over the quadrature nodes. This is a lower bound of
/// the true Hausdorff distance and converges to it as the nodes get dense.
double hausdorff_distance(const Body& a, const Body& b, const SphereQuadrature& directions);

/// Exact Hausdorff distance from a polytope to the centered ball of radius r.
double hausdorff_to_centered_ball(const PolytopeBody& body, double radius);

using SupportOracle = std::function<double(const Vec&)>;

/// x lies in the polar body L* iff h_L(x) <= 1.
bool polar_membership(const SupportOracle& h, const Vec& x, double tol = 1e-9);

/// Named test bodies: square, cube, simplex, cross. Bodies whose origin would
/// not be interior are translated to put their centroid at the origin.
PolytopeBody named_body(const std::string& name, int n, double scale = 1.0);

/// Hull of k seeded points with radii in [0.6, 1] on random directions,
/// translated to put the centroid at the origin.
PolytopeBody random_polytope(int n, int k, std::uint64_t seed);

}  // namespace orlicz
