#include "orlicz/symmetrization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "orlicz/hull.hpp"
#include "orlicz/parallel.hpp"
#include "orlicz/random.hpp"

namespace orlicz {
namespace {

constexpr double kVerticalTol = 1e-13;
constexpr double kDegenerateTol = 1e-9;

Vec unit_or_throw(const Vec& v) {
  const double r = v.norm();
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::InvalidSpec, "direction must be a nonzero finite vector");
  if (std::abs(r - 1.0) > 1e-9) fail(ErrorCode::InvalidSpec, "direction must be a unit vector");
  return v / r;
}

double body_scale(const PolytopeBody& body) {
  double s = 0.0;
  for (const auto& p : body.vertices()) s = std::max(s, p.norm());
  return s;
}

// Proper or touching intersection of segments [a, b] and [c, d] in the plane.
std::optional<Vec> segment_crossing(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  const Vec r = b - a, s = d - c;
  const double denom = r[0] * s[1] - r[1] * s[0];
  const double scale = r.norm() * s.norm();
  if (std::abs(denom) <= 1e-12 * scale) return std::nullopt;
  const Vec q = c - a;
  const double t = (q[0] * s[1] - q[1] * s[0]) / denom;
  const double u = (q[0] * r[1] - q[1] * r[0]) / denom;
  if (t < -1e-12 || t > 1 + 1e-12 || u < -1e-12 || u > 1 + 1e-12) return std::nullopt;
  return Vec(a + std::clamp(t, 0.0, 1.0) * r);
}

}  // namespace

// ------------------------------------------------------------- ChordFunctions

ChordFunctions::ChordFunctions(const PolytopeBody& body, const Vec& v) : v_(unit_or_throw(v)) {
  if (v_.size() != body.dim()) fail(ErrorCode::ShapeMismatch, "direction dimension does not match body");
  basis_ = orthonormal_complement(v_);
  for (const auto& f : body.facets()) {
    const double s = f.normal.dot(v_);
    const Vec tangential = basis_.transpose() * f.normal;
    if (std::abs(s) <= kVerticalTol) {
      side_normals_.push_back(tangential);
      side_rhs_.push_back(f.support);
    } else if (std::abs(s) < kDegenerateTol) {
      fail(ErrorCode::DegenerateDirection, "facet nearly parallel to the symmetrization direction");
    } else if (s > 0) {
      upper_normals_.push_back(tangential);
      upper_rhs_.push_back(f.support);
      upper_slope_.push_back(s);
    } else {
      lower_normals_.push_back(tangential);
      lower_rhs_.push_back(f.support);
      lower_slope_.push_back(s);
    }
  }
  if (upper_normals_.empty() || lower_normals_.empty()) {
    fail(ErrorCode::DegenerateHull, "body is unbounded along the direction");
  }
}

std::optional<ChordFunctions::Chord> ChordFunctions::chord(const Vec& z) const {
  if (z.size() != basis_.cols()) fail(ErrorCode::ShapeMismatch, "chord argument must live in v^perp coordinates");
  for (std::size_t i = 0; i < side_normals_.size(); ++i)
    if (side_normals_[i].dot(z) > side_rhs_[i] + 1e-12) return std::nullopt;
  Chord c;
  c.upper = std::numeric_limits<double>::infinity();
  c.lower = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < upper_normals_.size(); ++i) {
    const double tau = (upper_rhs_[i] - upper_normals_[i].dot(z)) / upper_slope_[i];
    if (tau < c.upper) {
      c.upper = tau;
      c.bracket_f2 = upper_rhs_[i] / upper_slope_[i];
    }
  }
  for (std::size_t i = 0; i < lower_normals_.size(); ++i) {
    const double tau = (lower_rhs_[i] - lower_normals_[i].dot(z)) / lower_slope_[i];
    if (tau > c.lower) {
      c.lower = tau;
      c.bracket_f1 = lower_rhs_[i] / -lower_slope_[i];
    }
  }
  if (c.upper < c.lower) {
    if (c.lower - c.upper > 1e-9 * (1.0 + std::abs(c.upper) + std::abs(c.lower))) return std::nullopt;
    c.upper = c.lower = 0.5 * (c.upper + c.lower);
  }
  return c;
}

// -------------------------------------------------------------------- steiner

PolytopeBody steiner(const PolytopeBody& body, const Vec& v) {
  const int n = body.dim();
  if (n != 2 && n != 3) fail(ErrorCode::UnsupportedDimension, "exact Steiner symmetrization needs n = 2 or 3");
  const ChordFunctions chords(body, v);
  const Mat& basis = chords.basis();
  const Vec& dir = chords.direction();

  std::vector<Vec> projected;
  projected.reserve(body.vertices().size());
  for (const auto& p : body.vertices()) projected.push_back(basis.transpose() * p);

  std::vector<Vec> candidates = projected;
  if (n == 3) {
    const auto edges = body.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const Vec& a = projected[edges[i].first];
      const Vec& b = projected[edges[i].second];
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        const auto [c, d] = edges[j];
        if (c == edges[i].first || c == edges[i].second || d == edges[i].first || d == edges[i].second) continue;
        if (auto x = segment_crossing(a, b, projected[c], projected[d])) candidates.push_back(*x);
      }
    }
  }

  std::vector<Vec> out;
  out.reserve(2 * candidates.size());
  for (const auto& z : candidates) {
    const auto c = chords.chord(z);
    if (!c) continue;
    const double half = 0.5 * std::max(0.0, c->upper - c->lower);
    const Vec base = basis * z;
    out.push_back(base + half * dir);
    out.push_back(base - half * dir);
  }
  return PolytopeBody::from_vertices(hull::deduplicate(out, 1e-9));
}

// ---------------------------------------------------------- DirectionSequence

Vec DirectionSequence::at(int step, int n) const {
  switch (kind) {
    case Kind::Random: {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(step)));
      return rng.unit_vector(n);
    }
    case Kind::Axes: return Vec::Unit(n, step % n);
    case Kind::List: {
      if (vectors.empty()) fail(ErrorCode::InvalidSpec, "direction list is empty");
      const Vec& w = vectors[static_cast<std::size_t>(step) % vectors.size()];
      if (w.size() != n) fail(ErrorCode::ShapeMismatch, "listed direction has the wrong dimension");
      const double r = w.norm();
      if (!(r > 0.0)) fail(ErrorCode::InvalidSpec, "listed direction is zero");
      return w / r;
    }
  }
  return Vec::Unit(n, 0);
}

// ----------------------------------------------------------------- simplify

PolytopeBody simplify_polytope(const PolytopeBody& body, std::size_t max_vertices) {
  const int n = body.dim();
  if (max_vertices < static_cast<std::size_t>(n + 1)) fail(ErrorCode::InvalidSpec, "vertex cap below n+1");
  if (body.vertices().size() <= max_vertices) return body;
  const Vec center = body.centroid();
  std::vector<Vec> kept;

  if (n == 2) {
    std::vector<Vec> ring = body.vertices();
    std::sort(ring.begin(), ring.end(), [&](const Vec& a, const Vec& b) {
      return std::atan2(a[1] - center[1], a[0] - center[0]) < std::atan2(b[1] - center[1], b[0] - center[0]);
    });
    // Greedy removal of the vertex whose triangle with its neighbours is
    // smallest, on a doubly linked ring with an ordered candidate set.
    const std::size_t k = ring.size();
    std::vector<std::size_t> prev(k), next(k);
    for (std::size_t i = 0; i < k; ++i) prev[i] = (i + k - 1) % k, next[i] = (i + 1) % k;
    auto deficit = [&](std::size_t i) {
      const Vec& a = ring[prev[i]];
      const Vec& b = ring[i];
      const Vec& c = ring[next[i]];
      return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
    };
    std::vector<double> key(k);
    std::set<std::pair<double, std::size_t>> queue;
    for (std::size_t i = 0; i < k; ++i) queue.emplace(key[i] = deficit(i), i);
    std::vector<char> alive(k, 1);
    for (std::size_t count = k; count > max_vertices; --count) {
      const std::size_t i = queue.begin()->second;
      queue.erase(queue.begin());
      alive[i] = 0;
      next[prev[i]] = next[i];
      prev[next[i]] = prev[i];
      for (std::size_t j : {prev[i], next[i]}) {
        queue.erase({key[j], j});
        queue.emplace(key[j] = deficit(j), j);
      }
    }
    std::vector<Vec> survivors;
    for (std::size_t i = 0; i < k; ++i)
      if (alive[i]) survivors.push_back(ring[i]);
    ring = std::move(survivors);
    kept = std::move(ring);
  } else {
    double delta = 1e-3 * body_scale(body);
    for (;;) {
      std::map<std::vector<long long>, std::pair<Vec, int>> cells;
      for (const auto& p : body.vertices()) {
        std::vector<long long> key(n);
        for (int i = 0; i < n; ++i) key[i] = static_cast<long long>(std::floor(p[i] / delta));
        auto [it, fresh] = cells.try_emplace(key, Vec::Zero(n), 0);
        it->second.first += p;
        ++it->second.second;
      }
      kept.clear();
      for (auto& [key, cell] : cells) kept.push_back(cell.first / cell.second);
      if (kept.size() <= max_vertices) {
        const PolytopeBody trial = PolytopeBody::from_vertices(kept);
        if (trial.vertices().size() <= max_vertices) break;
      }
      delta *= 1.5;
    }
  }

  const PolytopeBody reduced = PolytopeBody::from_vertices(kept);
  const double s = std::pow(body.volume() / reduced.volume(), 1.0 / n);
  std::vector<Vec> scaled;
  scaled.reserve(reduced.vertices().size());
  for (const auto& p : reduced.vertices()) scaled.push_back(center + s * (p - center));
  return PolytopeBody::from_vertices(scaled);
}

// ---------------------------------------------------------- iterate_steiner

SteinerTrajectory iterate_steiner(const PolytopeBody& body, const DirectionSequence& directions, int iterations,
                                  const SteinerOptions& options) {
  if (iterations < 1) fail(ErrorCode::InvalidSpec, "iterations must be >= 1");
  const int n = body.dim();
  SteinerTrajectory traj;

  auto record = [&](const PolytopeBody& k, int it, const Vec& dir, const Vec& shift, double drift, bool simplified) {
    SteinerStep s;
    s.iteration = it;
    s.direction = dir;
    s.translation = shift;
    s.volume = k.volume();
    s.step_volume_drift = drift;
    const double c = std::pow(k.volume() / unit_ball_volume(n), 1.0 / n);
    s.hausdorff_to_ball = hausdorff_to_centered_ball(k, c);
    s.vertices = k.vertices().size();
    s.simplified = simplified;
    traj.steps.push_back(std::move(s));
    traj.bodies.push_back(k);
  };

  Vec shift = -body.centroid();
  PolytopeBody current = body.translated(shift);
  traj.ball_radius = std::pow(current.volume() / unit_ball_volume(n), 1.0 / n);
  record(current, 0, Vec::Zero(n), shift, 0.0, false);

  for (int it = 1; it <= iterations; ++it) {
    Vec v = directions.at(it - 1, n);
    std::optional<PolytopeBody> next;
    Rng jitter(derive_seed(directions.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(it)));
    for (int attempt = 0; !next; ++attempt) {
      try {
        next = steiner(current, v);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateDirection || attempt >= 8) throw;
        v = (v + 1e-6 * jitter.unit_vector(n)).normalized();
      }
    }
    const double drift = std::abs(next->volume() - current.volume()) / current.volume();
    if (options.keep_raw) traj.raw.push_back(*next);
    bool simplified = false;
    if (options.simplify && next->vertices().size() > options.max_vertices) {
      next = simplify_polytope(*next, options.max_vertices);
      simplified = true;
    }
    shift = -next->centroid();
    current = next->translated(shift);
    record(current, it, v, shift, drift, simplified);
  }
  return traj;
}

// ------------------------------------------------------- fiber symmetrization

namespace {

// sup{r >= 0 : c0 + r w in C} given c0 in C, by doubling then bisection.
double ray_length(const std::function<bool(const Vec&)>& in_section, const Vec& c0, const Vec& w, double ray_tol) {
  double lo = 0.0, hi = 1.0;
  while (in_section(c0 + hi * w)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1.0p60) fail(ErrorCode::EmptySection, "section is unbounded along a ray");
  }
  while (hi - lo > ray_tol * std::max(hi, 1e-3)) {
    const double mid = 0.5 * (lo + hi);
    if (in_section(c0 + mid * w)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

std::vector<Vec> fiber_section_symmetral(const Membership& membership, const MatrixShape& shape, const Vec& v,
                                         const Vec& base, int rays, std::uint64_t seed, double ray_tol) {
  shape.require(base);
  const Vec dir = unit_or_throw(v);
  if (dir.size() != shape.n) fail(ErrorCode::ShapeMismatch, "symmetrization direction must live in R^n");
  const auto bm = as_matrix(base, shape);
  if ((dir.transpose() * bm).norm() > 1e-9 * (1.0 + base.norm())) {
    fail(ErrorCode::InvalidSpec, "base point is not in V^m(v)");
  }
  const int m = shape.m;
  auto lift = [&](const Vec& s) -> Vec {
    Mat x = bm;
    x += dir * s.transpose();
    return flatten(x);
  };
  auto in_section = [&](const Vec& s) { return membership(lift(s)); };

  Rng rng(seed);
  Vec c0 = Vec::Zero(m);
  if (!in_section(c0)) {
    bool found = false;
    for (double radius = 1e-3; radius < 1e6 && !found; radius *= 2.0) {
      for (int k = 0; k < 64 && !found; ++k) {
        const Vec s = radius * rng.uniform() * rng.unit_vector(m);
        if (in_section(s)) c0 = s, found = true;
      }
    }
    if (!found) fail(ErrorCode::EmptySection, "base point is outside the projection of the body");
  }

  std::vector<Vec> out;
  out.reserve(rays);
  for (int r = 0; r < rays; ++r) {
    const Vec w1 = rng.unit_vector(m);
    const bool boundary = r % 2 == 0;
    const Vec w2 = boundary ? Vec(-w1) : rng.unit_vector(m);
    const double l1 = boundary ? 1.0 : rng.uniform();
    const double l2 = boundary ? 1.0 : rng.uniform();
    const Vec t = c0 + l1 * ray_length(in_section, c0, w1, ray_tol) * w1;
    const Vec s_neg = c0 + l2 * ray_length(in_section, c0, w2, ray_tol) * w2;  // -s in C
    out.push_back(lift(0.5 * (t - s_neg)));
  }
  return out;
}

InclusionReport check_inclusion(const PolytopeBody& body, const OrliczFunction& phi, const Vec& v, int bases, int rays,
                                std::uint64_t seed, double tol, unsigned threads) {
  const int n = body.dim();
  const Vec dir = unit_or_throw(v);
  const PolytopeBody sym = steiner(body, dir);
  const ProjectionBodyOracle pk(Body(body), phi);
  const ProjectionBodyOracle psk(Body(sym), phi);
  const MatrixShape shape(n, phi.m());
  const Membership in_polar = [&](const Vec& x) { return x.isZero(0.0) || pk.h(x) <= 1.0; };

  std::vector<std::size_t> violations(bases, 0);
  std::vector<double> worst(bases, -std::numeric_limits<double>::infinity());
  parallel_for(static_cast<std::size_t>(bases), resolve_threads(threads), [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      Rng rng(derive_seed(seed, b));
      Mat g = Mat::Zero(n, phi.m());
      for (int j = 0; j < phi.m(); ++j) g.col(j) = rng.normal_vector(n);
      g -= dir * (dir.transpose() * g);
      Vec xi = flatten(g);
      xi /= pk.h(xi);
      const Vec base = rng.uniform() * xi;
      const auto points = fiber_section_symmetral(in_polar, shape, dir, base, rays, rng.next());
      for (const auto& x : points) {
        const double excess = psk.h(x) - 1.0;
        worst[b] = std::max(worst[b], excess);
        if (excess > tol) ++violations[b];
      }
    }
  });

  InclusionReport report;
  report.tolerance = tol;
  report.samples = static_cast<std::size_t>(bases) * static_cast<std::size_t>(rays);
  report.worst_excess = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < bases; ++b) {
    report.violations += violations[b];
    report.worst_excess = std::max(report.worst_excess, worst[b]);
  }
  report.pass = report.violations == 0;
  return report;
}

}  // namespace orlicz
