#pragma once

#include <vector>

#include "orlicz/linalg.hpp"

namespace orlicz::hull {

/// A merged facet: all coplanar simplicial pieces share one record.
struct Face {
  Vec normal;                // outward unit normal
  double offset = 0.0;       // normal . y <= offset on the hull
  double area = 0.0;         // (d-1)-dimensional measure
  std::vector<int> vertices; // indices into HullResult::vertices
};

struct HullResult {
  std::vector<Vec> vertices;  // extreme points only
  std::vector<Face> faces;
  double volume = 0.0;
  Vec centroid;
};

struct HullOptions {
  /// Relative tolerance (times the point-cloud radius) for merging coplanar
  /// pieces and for deciding that a point is beyond a facet.
  double coplanar_tol = 1e-10;
  /// Relative distance under which two input points are considered equal.
  double duplicate_tol = 1e-12;
};

/// Convex hull of a point cloud in R^d, d >= 2, with facets enumerated via a
/// simplicial (beneath-beyond) construction and merged by plane. Throws
/// DegenerateHull when the points do not span R^d.
HullResult convex_hull(const std::vector<Vec>& points, const HullOptions& options = {});

/// Drops points closer than tol to an earlier kept point (relative to nothing:
/// tol is absolute).
std::vector<Vec> deduplicate(const std::vector<Vec>& points, double tol);

}  // namespace orlicz::hull
