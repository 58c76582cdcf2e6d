#include "orlicz/body.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "orlicz/hull.hpp"
#include "orlicz/random.hpp"

namespace orlicz {

PolytopeBody PolytopeBody::from_vertices(const std::vector<Vec>& points) {
  if (points.empty()) fail(ErrorCode::DegenerateHull, "no points");
  const int n = static_cast<int>(points.front().size());
  if (static_cast<int>(points.size()) < n + 1) fail(ErrorCode::DegenerateHull, "need at least n+1 points");
  hull::HullResult h = hull::convex_hull(points);

  PolytopeBody body;
  body.n_ = n;
  body.vertices_ = std::move(h.vertices);
  body.volume_ = h.volume;
  body.centroid_ = h.centroid;
  for (auto& face : h.faces) {
    if (face.offset <= 1e-12) {
      fail(ErrorCode::OriginNotInterior, "facet with support " + std::to_string(face.offset));
    }
    body.facets_.push_back({std::move(face.normal), face.area, face.offset, std::move(face.vertices)});
  }
  return body;
}

double PolytopeBody::support(const Vec& x) const {
  if (x.size() != n_) fail(ErrorCode::ShapeMismatch, "direction dimension does not match body");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_) best = std::max(best, x.dot(v));
  return best;
}

PolytopeBody PolytopeBody::transformed(const Mat& a) const {
  std::vector<Vec> pts;
  pts.reserve(vertices_.size());
  for (const auto& v : vertices_) pts.push_back(a * v);
  return from_vertices(pts);
}

PolytopeBody PolytopeBody::translated(const Vec& t) const {
  std::vector<Vec> pts;
  pts.reserve(vertices_.size());
  for (const auto& v : vertices_) pts.push_back(v + t);
  return from_vertices(pts);
}

PolytopeBody PolytopeBody::scaled(double c) const {
  std::vector<Vec> pts;
  pts.reserve(vertices_.size());
  for (const auto& v : vertices_) pts.push_back(c * v);
  return from_vertices(pts);
}

std::vector<std::pair<int, int>> PolytopeBody::edges() const {
  std::set<std::pair<int, int>> out;
  if (n_ == 2) {
    for (const auto& f : facets_) {
      if (f.vertices.size() != 2) fail(ErrorCode::DegenerateHull, "planar facet without two endpoints");
      out.insert(std::minmax(f.vertices[0], f.vertices[1]));
    }
  } else if (n_ == 3) {
    // Order each face's vertices by angle in its plane; consecutive pairs are edges.
    for (const auto& f : facets_) {
      const Mat basis = orthonormal_complement(f.normal);
      Vec center = Vec::Zero(3);
      for (int id : f.vertices) center += vertices_[id];
      center /= static_cast<double>(f.vertices.size());
      std::vector<std::pair<double, int>> ring;
      for (int id : f.vertices) {
        const Vec local = basis.transpose() * (vertices_[id] - center);
        ring.emplace_back(std::atan2(local[1], local[0]), id);
      }
      std::sort(ring.begin(), ring.end());
      for (std::size_t k = 0; k < ring.size(); ++k) {
        const int a = ring[k].second, b = ring[(k + 1) % ring.size()].second;
        out.insert(std::minmax(a, b));
      }
    }
  } else {
    fail(ErrorCode::UnsupportedDimension, "edge enumeration implemented for n = 2, 3");
  }
  return {out.begin(), out.end()};
}

BallBody::BallBody(int n, double radius) : n_(n), radius_(radius) {
  if (n < 1) fail(ErrorCode::ShapeMismatch, "ball dimension must be >= 1");
  if (!(radius > 0.0)) fail(ErrorCode::InvalidSpec, "ball radius must be positive");
}

double BallBody::volume() const { return std::pow(radius_, n_) * unit_ball_volume(n_); }

int dimension(const Body& body) {
  return std::visit([](const auto& b) { return b.dim(); }, body);
}

double volume(const Body& body) {
  return std::visit([](const auto& b) { return b.volume(); }, body);
}

double support_value(const Body& body, const Vec& x) {
  if (x.size() != dimension(body)) fail(ErrorCode::ShapeMismatch, "direction dimension does not match body");
  return std::visit([&](const auto& b) { return b.support(x); }, body);
}

double hausdorff_distance(const Body& a, const Body& b, const SphereQuadrature& directions) {
  if (dimension(a) != dimension(b)) fail(ErrorCode::ShapeMismatch, "bodies live in different dimensions");
  if (directions.dim() != dimension(a)) fail(ErrorCode::ShapeMismatch, "quadrature on the wrong sphere");
  double worst = 0.0;
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const Vec u = directions.node(k);
    worst = std::max(worst, std::abs(support_value(a, u) - support_value(b, u)));
  }
  return worst;
}

double hausdorff_to_centered_ball(const PolytopeBody& body, double radius) {
  // max_u h_K(u) is the circumradius about o; min_u h_K(u) is the smallest
  // facet support.
  double outer = 0.0;
  for (const auto& v : body.vertices()) outer = std::max(outer, v.norm());
  double inner = std::numeric_limits<double>::infinity();
  for (const auto& f : body.facets()) inner = std::min(inner, f.support);
  return std::max(outer - radius, radius - inner);
}

bool polar_membership(const SupportOracle& h, const Vec& x, double tol) {
  if (x.isZero(0.0)) return true;
  return h(x) <= 1.0 + tol;
}

PolytopeBody named_body(const std::string& name, int n, double scale) {
  if (n < 2) fail(ErrorCode::InvalidSpec, "named bodies need n >= 2");
  if (!(scale > 0.0)) fail(ErrorCode::InvalidSpec, "scale must be positive");
  std::vector<Vec> pts;
  bool recenter = false;
  if (name == "square" || name == "cube") {
    if (name == "square" && n != 2) fail(ErrorCode::InvalidSpec, "square is planar; use cube");
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = (mask >> i & 1) ? scale : -scale;
      pts.push_back(p);
    }
  } else if (name == "simplex") {
    pts.push_back(Vec::Zero(n));
    for (int i = 0; i < n; ++i) pts.push_back(scale * Vec::Unit(n, i));
    recenter = true;
  } else if (name == "cross") {
    for (int i = 0; i < n; ++i) {
      pts.push_back(scale * Vec::Unit(n, i));
      pts.push_back(-scale * Vec::Unit(n, i));
    }
  } else {
    fail(ErrorCode::InvalidSpec, "unknown named body '" + name + "'");
  }
  if (recenter) {
    Vec c = Vec::Zero(n);
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    for (auto& p : pts) p -= c;
  }
  return PolytopeBody::from_vertices(pts);
}

PolytopeBody random_polytope(int n, int k, std::uint64_t seed) {
  if (k < n + 1) fail(ErrorCode::InvalidSpec, "need at least n+1 points");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Vec> pts;
    for (int i = 0; i < k; ++i) pts.push_back(rng.uniform(0.6, 1.0) * rng.unit_vector(n));
    try {
      PolytopeBody raw = PolytopeBody::from_vertices(pts);
      return raw.translated(-raw.centroid());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OriginNotInterior && e.code() != ErrorCode::DegenerateHull) throw;
    }
  }
  fail(ErrorCode::DegenerateHull, "could not draw a full-dimensional random polytope");
}

}  // namespace orlicz
