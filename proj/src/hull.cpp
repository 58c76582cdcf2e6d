#include "orlicz/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace orlicz::hull {
namespace {

struct Simplex {
  std::vector<int> ids;  // sorted
  Vec normal;
  double offset = 0.0;
  double area = 0.0;
  bool alive = true;
};

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Generalized cross product of the d-1 edge vectors p_k - p_0.
Vec cofactor_normal(const std::vector<Vec>& pts, const std::vector<int>& ids) {
  const int d = static_cast<int>(pts[ids[0]].size());
  Mat e(d - 1, d);
  for (int k = 1; k < d; ++k) e.row(k - 1) = (pts[ids[k]] - pts[ids[0]]).transpose();
  Vec n(d);
  if (d == 2) {
    n << e(0, 1), -e(0, 0);
    return n;
  }
  Mat minor(d - 1, d - 1);
  for (int i = 0; i < d; ++i) {
    for (int c = 0, cc = 0; c < d; ++c) {
      if (c == i) continue;
      minor.col(cc++) = e.col(c);
    }
    n[i] = ((i % 2) ? -1.0 : 1.0) * minor.determinant();
  }
  return n;
}

Simplex make_simplex(const std::vector<Vec>& pts, std::vector<int> ids, const Vec& interior) {
  std::sort(ids.begin(), ids.end());
  Simplex s;
  const Vec raw = cofactor_normal(pts, ids);
  const double len = raw.norm();
  s.ids = std::move(ids);
  s.area = len / factorial(static_cast<int>(raw.size()) - 1);
  if (len == 0.0) {
    s.normal = Vec::Zero(raw.size());
    s.offset = 0.0;
    return s;
  }
  s.normal = raw / len;
  s.offset = s.normal.dot(pts[s.ids[0]]);
  if (s.normal.dot(interior) > s.offset) {
    s.normal = -s.normal;
    s.offset = -s.offset;
  }
  return s;
}

}  // namespace

std::vector<Vec> deduplicate(const std::vector<Vec>& points, double tol) {
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (points[a][0] != points[b][0]) return points[a][0] < points[b][0];
    return a < b;
  });
  std::vector<char> dropped(points.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (dropped[order[i]]) continue;
    const Vec& p = points[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Vec& q = points[order[j]];
      if (q[0] - p[0] > tol) break;
      if (!dropped[order[j]] && (q - p).norm() <= tol) dropped[order[j]] = 1;
    }
  }
  std::vector<Vec> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!dropped[i]) out.push_back(points[i]);
  return out;
}

HullResult convex_hull(const std::vector<Vec>& input, const HullOptions& options) {
  if (input.empty()) fail(ErrorCode::DegenerateHull, "empty point set");
  const int d = static_cast<int>(input[0].size());
  if (d < 2) fail(ErrorCode::UnsupportedDimension, "hull needs dimension >= 2");
  Vec mean = Vec::Zero(d);
  for (const auto& p : input) {
    if (p.size() != d) fail(ErrorCode::ShapeMismatch, "points of mixed dimension");
    if (!p.allFinite()) fail(ErrorCode::NonFinite, "non-finite point");
    mean += p;
  }
  mean /= static_cast<double>(input.size());
  double scale = 0.0;
  for (const auto& p : input) scale = std::max(scale, (p - mean).norm());
  if (scale == 0.0) fail(ErrorCode::DegenerateHull, "all points coincide");

  const std::vector<Vec> pts = deduplicate(input, options.duplicate_tol * scale);
  const int count = static_cast<int>(pts.size());
  if (count < d + 1) fail(ErrorCode::DegenerateHull, "need at least d+1 distinct points");

  // Initial simplex: greedily maximize distance from the current affine span.
  std::vector<int> chosen;
  {
    int first = 0;
    double best = -1.0;
    for (int i = 0; i < count; ++i) {
      const double r = (pts[i] - mean).norm();
      if (r > best) best = r, first = i;
    }
    chosen.push_back(first);
    std::vector<Vec> basis;
    for (int k = 1; k <= d; ++k) {
      int arg = -1;
      double far = -1.0;
      for (int i = 0; i < count; ++i) {
        Vec r = pts[i] - pts[first];
        for (const auto& b : basis) r -= b.dot(r) * b;
        const double dist = r.norm();
        if (dist > far) far = dist, arg = i;
      }
      if (far <= 1e-10 * scale) fail(ErrorCode::DegenerateHull, "points are affinely dependent");
      Vec r = pts[arg] - pts[first];
      for (const auto& b : basis) r -= b.dot(r) * b;
      basis.push_back(r.normalized());
      chosen.push_back(arg);
    }
  }
  Vec interior = Vec::Zero(d);
  for (int id : chosen) interior += pts[id];
  interior /= static_cast<double>(d + 1);

  std::vector<Simplex> simplices;
  for (int skip = 0; skip <= d; ++skip) {
    std::vector<int> ids;
    for (int k = 0; k <= d; ++k)
      if (k != skip) ids.push_back(chosen[k]);
    simplices.push_back(make_simplex(pts, ids, interior));
  }

  std::vector<int> order;
  for (int i = 0; i < count; ++i)
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return (pts[a] - interior).squaredNorm() > (pts[b] - interior).squaredNorm();
  });

  const double eps = options.coplanar_tol * scale;
  std::size_t dead = 0;
  for (int p : order) {
    std::vector<int> visible;
    for (int s = 0; s < static_cast<int>(simplices.size()); ++s) {
      const auto& sx = simplices[s];
      if (sx.alive && sx.normal.dot(pts[p]) - sx.offset > eps) visible.push_back(s);
    }
    if (visible.empty()) continue;
    std::map<std::vector<int>, int> ridges;
    for (int s : visible) {
      const auto& ids = simplices[s].ids;
      for (int drop = 0; drop < d; ++drop) {
        std::vector<int> ridge;
        ridge.reserve(d - 1);
        for (int k = 0; k < d; ++k)
          if (k != drop) ridge.push_back(ids[k]);
        ++ridges[ridge];
      }
      simplices[s].alive = false;
      ++dead;
    }
    for (auto& [ridge, hits] : ridges) {
      if (hits != 1) continue;
      std::vector<int> ids = ridge;
      ids.push_back(p);
      simplices.push_back(make_simplex(pts, std::move(ids), interior));
    }
    if (dead > simplices.size() / 2 && dead > 64) {
      std::erase_if(simplices, [](const Simplex& s) { return !s.alive; });
      dead = 0;
    }
  }
  std::erase_if(simplices, [](const Simplex& s) { return !s.alive || s.area == 0.0; });

  HullResult out;
  // Volume and centroid by coning from the interior point.
  {
    double vol = 0.0;
    Vec moment = Vec::Zero(d);
    for (const auto& s : simplices) {
      const double v = s.area * (s.offset - s.normal.dot(interior)) / d;
      Vec c = interior;
      for (int id : s.ids) c += pts[id];
      c /= static_cast<double>(d + 1);
      vol += v;
      moment += v * c;
    }
    out.volume = vol;
    out.centroid = moment / vol;
  }

  // Merge coplanar simplices into faces.
  struct Group {
    Vec rep;
    double offset;
    Vec weighted_normal;
    double area;
  };
  std::vector<Group> groups;
  for (const auto& s : simplices) {
    bool merged = false;
    for (auto& g : groups) {
      if ((g.rep - s.normal).norm() <= options.coplanar_tol && std::abs(g.offset - s.offset) <= eps) {
        g.weighted_normal += s.area * s.normal;
        g.area += s.area;
        merged = true;
        break;
      }
    }
    if (!merged) groups.push_back({s.normal, s.offset, s.area * s.normal, s.area});
  }

  // Extreme points: on the hull boundary and on faces whose normals span R^d.
  std::vector<char> used(count, 0);
  for (const auto& s : simplices)
    for (int id : s.ids) used[id] = 1;
  const double incidence_tol = 1e-9 * scale;
  std::vector<Vec> normals;
  std::vector<double> offsets;
  for (const auto& g : groups) {
    normals.push_back(g.weighted_normal.normalized());
    double h = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i)
      if (used[i]) h = std::max(h, normals.back().dot(pts[i]));
    offsets.push_back(h);
  }
  for (int i = 0; i < count; ++i) {
    if (!used[i]) continue;
    std::vector<int> incident;
    for (std::size_t f = 0; f < normals.size(); ++f)
      if (std::abs(normals[f].dot(pts[i]) - offsets[f]) <= incidence_tol) incident.push_back(static_cast<int>(f));
    if (static_cast<int>(incident.size()) < d) continue;
    Mat nm(d, incident.size());
    for (std::size_t k = 0; k < incident.size(); ++k) nm.col(k) = normals[incident[k]];
    Eigen::ColPivHouseholderQR<Mat> qr(nm);
    qr.setThreshold(1e-9);
    if (qr.rank() == d) out.vertices.push_back(pts[i]);
  }
  for (std::size_t f = 0; f < groups.size(); ++f) {
    Face face;
    face.normal = normals[f];
    face.area = groups[f].area;
    double h = -std::numeric_limits<double>::infinity();
    for (const auto& v : out.vertices) h = std::max(h, face.normal.dot(v));
    face.offset = h;
    for (int k = 0; k < static_cast<int>(out.vertices.size()); ++k)
      if (std::abs(face.normal.dot(out.vertices[k]) - h) <= incidence_tol) face.vertices.push_back(k);
    out.faces.push_back(std::move(face));
  }
  return out;
}

}  // namespace orlicz::hull
