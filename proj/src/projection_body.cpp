#include "orlicz/projection_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace orlicz {

double DirectionProfile::operator()(double t) const {
  if (t < 0.0) fail(ErrorCode::InvalidSpec, "H_x is defined for t >= 0");
  if (scalar) return phi->profile().weighted_sum(t, values.data(), coeffs.data(), coeffs.size());
  return phi->weighted_sum(t, values.data(), coeffs.data(), coeffs.size());
}

HEvaluator::HEvaluator(SurfaceMeasure measure, OrliczFunction phi, MatrixShape shape, double volume)
    : measure_(std::move(measure)), phi_(std::move(phi)), shape_(shape), target_(shape.n * volume) {
  if (measure_.dim() != shape_.n) fail(ErrorCode::ShapeMismatch, "surface measure dimension differs from n");
  if (phi_.m() != shape_.m) fail(ErrorCode::ShapeMismatch, "Phi is defined on R^m with a different m");
  if (!(target_ > 0.0) || !std::isfinite(target_)) fail(ErrorCode::InvalidSpec, "n V_n(K) must be positive");
  if (measure_.rotation_invariant()) reduced_ = measure_.marginal(std::min(shape_.n, shape_.m));
}

Vec HEvaluator::canonical(const Vec& x) const {
  shape_.require(x);
  if (!measure_.rotation_invariant()) return x;
  const Mat xm = as_matrix(x, shape_);
  Eigen::HouseholderQR<Mat> qr(xm);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  const int rows = std::min(shape_.n, shape_.m);
  Mat out = Mat::Zero(shape_.n, shape_.m);
  for (int i = 0; i < rows; ++i) {
    const double sign = r(i, i) < 0.0 ? -1.0 : 1.0;
    out.row(i) = sign * r.row(i);
  }
  return flatten(out);
}

DirectionProfile HEvaluator::profile(const Vec& x) const {
  shape_.require(x);
  const bool reduce = measure_.rotation_invariant();
  const SurfaceMeasure& atoms = reduce ? reduced_ : measure_;
  const int m = shape_.m;
  Mat y;
  if (reduce) {
    const Mat xc = as_matrix(canonical(x), shape_);
    y = atoms.directions().transpose() * xc.topRows(atoms.dim());
  } else {
    y = atoms.directions().transpose() * as_matrix(x, shape_);
  }

  DirectionProfile p;
  p.phi = &phi_;
  p.scalar = phi_.has_gauge();
  const std::size_t count = atoms.size();
  p.values.reserve(p.scalar ? count : count * m);
  p.coeffs.reserve(count);
  std::vector<double> row(m);
  for (std::size_t k = 0; k < count; ++k) {
    const double h = atoms.supports()[k];
    const double c = h * atoms.weights()[k];
    for (int j = 0; j < m; ++j) row[j] = y(static_cast<Eigen::Index>(k), j) / h;
    if (p.scalar) {
      const double g = phi_.gauge(row.data());
      if (g == 0.0) continue;
      p.values.push_back(g);
    } else {
      p.values.insert(p.values.end(), row.begin(), row.end());
    }
    p.coeffs.push_back(c);
  }
  return p;
}

double h_eval_raw(const HEvaluator& e, const Vec& x, double t) { return e(x, t); }

namespace {

struct Bracket {
  double lo, flo, hi, fhi;
  int steps;
};

double checked(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "H_x evaluated to a non-finite value");
  return v;
}

constexpr double kMaxScale = 0x1.0p200;

std::mutex tally_mutex;
CertificateTally tally;

void record_certificate(double residual, double tol) {
  std::lock_guard lock(tally_mutex);
  ++tally.calls;
  if (!(residual <= tol)) ++tally.failures;
  tally.worst_residual = std::max(tally.worst_residual, residual);
}

Bracket find_bracket(const DirectionProfile& f, double target) {
  Bracket b{};
  double t = 1.0;
  double ht = checked(f(t));
  // Plateau: H vanishes on [0, b0]; walk out of it.
  while (ht == 0.0) {
    t *= 2.0;
    if (t > kMaxScale) fail(ErrorCode::NoBracket, "H_x stays zero up to t = 2^200");
    ht = checked(f(t));
    ++b.steps;
  }
  // H is convex with H(0) = 0, so H(s t)/s is nondecreasing in s.
  if (ht <= target) {
    b.lo = t;
    b.flo = ht - target;
    b.hi = t * (target / ht);
    b.fhi = checked(f(b.hi)) - target;
    while (b.fhi < 0.0) {
      b.lo = b.hi;
      b.flo = b.fhi;
      b.hi *= 2.0;
      if (b.hi > kMaxScale) fail(ErrorCode::NoBracket, "H_x does not reach n V_n(K) below t = 2^200");
      b.fhi = checked(f(b.hi)) - target;
      ++b.steps;
    }
  } else {
    b.hi = t;
    b.fhi = ht - target;
    b.lo = t * (target / ht);
    b.flo = checked(f(b.lo)) - target;
    while (b.flo > 0.0) {
      b.hi = b.lo;
      b.fhi = b.flo;
      b.lo *= 0.5;
      if (b.lo < 1.0 / kMaxScale) fail(ErrorCode::NoBracket, "H_x exceeds n V_n(K) above t = 2^-200");
      b.flo = checked(f(b.lo)) - target;
      ++b.steps;
    }
  }
  return b;
}

}  // namespace

SolveResult solve_support(const HEvaluator& e, const Vec& x, const SolverSettings& settings) {
  e.shape().require(x);
  if (x.isZero(0.0)) fail(ErrorCode::InvalidSpec, "support of the projection body is solved for x != o");
  const DirectionProfile f = e.profile(x);
  const double target = e.target();
  const double ftol = 1e-2 * settings.certificate_tol * target;

  SolveResult result;
  Bracket br = find_bracket(f, target);
  result.bracket_steps = br.steps;

  double root;
  double froot;
  if (br.flo == 0.0 || br.fhi == 0.0) {
    root = br.flo == 0.0 ? br.lo : br.hi;
    froot = 0.0;
  } else if (settings.method == RootMethod::Bisection) {
    double lo = br.lo, hi = br.hi, flo = br.flo, fhi = br.fhi;
    int it = 0;
    while (hi - lo > settings.rel_tol * hi && it < settings.max_iter) {
      const double mid = 0.5 * (lo + hi);
      const double fm = checked(f(mid)) - target;
      ++it;
      if (fm == 0.0) {
        lo = hi = mid;
        flo = fhi = 0.0;
        break;
      }
      if (fm < 0.0) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
        fhi = fm;
      }
    }
    result.iterations = it;
    if (std::abs(flo) <= std::abs(fhi)) {
      root = lo;
      froot = flo;
    } else {
      root = hi;
      froot = fhi;
    }
  } else {
    // Brent's method on g(t) = H(t) - target over [lo, hi].
    double a = br.lo, b = br.hi, fa = br.flo, fb = br.fhi;
    double c = a, fc = fa, d = b - a, ed = d;
    int it = 0;
    for (; it < settings.max_iter; ++it) {
      if ((fb > 0.0) == (fc > 0.0)) {
        c = a;
        fc = fa;
        d = ed = b - a;
      }
      if (std::abs(fc) < std::abs(fb)) {
        a = b;
        b = c;
        c = a;
        fa = fb;
        fb = fc;
        fc = fa;
      }
      const double tol = 0.5 * settings.rel_tol * std::abs(b);
      const double xm = 0.5 * (c - b);
      if (std::abs(xm) <= tol || std::abs(fb) <= ftol) break;
      if (std::abs(ed) >= tol && std::abs(fa) > std::abs(fb)) {
        double p, q;
        const double s = fb / fa;
        if (a == c) {
          p = 2.0 * xm * s;
          q = 1.0 - s;
        } else {
          const double qq = fa / fc, r = fb / fc;
          p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
          q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
        }
        if (p > 0.0) q = -q;
        p = std::abs(p);
        if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol * q), std::abs(ed * q))) {
          ed = d;
          d = p / q;
        } else {
          d = xm;
          ed = d;
        }
      } else {
        d = xm;
        ed = d;
      }
      a = b;
      fa = fb;
      b += std::abs(d) > tol ? d : (xm > 0 ? tol : -tol);
      fb = checked(f(b)) - target;
    }
    result.iterations = it;
    root = b;
    froot = fb;
  }
  result.t = root;
  result.h = 1.0 / root;
  result.residual = std::abs(froot) / target;
  record_certificate(result.residual, settings.certificate_tol);
  return result;
}

CertificateTally certificate_tally() {
  std::lock_guard lock(tally_mutex);
  return tally;
}

void reset_certificate_tally() {
  std::lock_guard lock(tally_mutex);
  tally = {};
}

std::size_t ProjectionBodyOracle::KeyHash::operator()(const std::vector<long long>& key) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (long long v : key) {
    h ^= static_cast<std::uint64_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

ProjectionBodyOracle::ProjectionBodyOracle(const Body& body, OrliczFunction phi, OracleSettings settings)
    : settings_(std::move(settings)), volume_(volume(body)) {
  const int n = dimension(body);
  const MatrixShape shape(n, phi.m());
  SurfaceMeasure measure;
  if (std::holds_alternative<BallBody>(body)) {
    const QuadratureSpec spec = settings_.ball_measure.value_or(default_ball_measure_spec(n));
    const SphereQuadrature nodes = make_quadrature(n, spec);
    measure = surface_measure(body, &nodes);
  } else {
    measure = surface_measure(body);
  }
  evaluator_ = std::make_shared<HEvaluator>(std::move(measure), std::move(phi), shape, volume_);
}

double ProjectionBodyOracle::h(const Vec& x) const {
  shape().require(x);
  if (!x.allFinite()) fail(ErrorCode::NonFinite, "direction is not finite");
  const double norm = x.norm();
  if (norm == 0.0) return 0.0;
  const Vec u = evaluator_->canonical(x) / norm;

  std::vector<long long> key(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) key[static_cast<std::size_t>(i)] = std::llround(u[i] * 1e12);
  {
    std::shared_lock lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      std::lock_guard stats_lock(stats_mutex_);
      ++stats_.cache_hits;
      return norm * it->second;
    }
  }
  const SolveResult r = solve_support(*evaluator_, u, settings_.solver);
  {
    std::lock_guard stats_lock(stats_mutex_);
    ++stats_.solves;
    stats_.max_iterations = std::max(stats_.max_iterations, r.iterations);
    stats_.worst_residual = std::max(stats_.worst_residual, r.residual);
    if (r.residual > settings_.solver.certificate_tol) ++stats_.certificate_failures;
  }
  if (!(r.h > 0.0)) fail(ErrorCode::NonPositiveSupport, "projection body support is not positive");
  {
    std::unique_lock lock(cache_mutex_);
    if (cache_.size() < settings_.cache_capacity) cache_.emplace(std::move(key), r.h);
  }
  return norm * r.h;
}

OracleStats ProjectionBodyOracle::stats() const {
  std::lock_guard lock(stats_mutex_);
  return stats_;
}

void ProjectionBodyOracle::reset_stats() {
  std::lock_guard lock(stats_mutex_);
  stats_ = {};
}

double lp_closed_form(const PolytopeBody& body, const QBody& q, double p, const Vec& x) {
  if (!(p >= 1.0)) fail(ErrorCode::InvalidSpec, "closed form needs p >= 1");
  const MatrixShape shape(body.dim(), q.m());
  shape.require(x);
  const Eigen::Map<const Mat> xm = as_matrix(x, shape);
  std::vector<double> terms;
  terms.reserve(body.facets().size());
  Vec row(q.m());
  for (const auto& f : body.facets()) {
    row = xm.transpose() * f.normal;
    const double hq = q.support(row);
    terms.push_back(std::pow(hq, p) * std::pow(f.support, 1.0 - p) * f.area);
  }
  const double sum = pairwise_sum(terms);
  return std::pow(sum / (body.dim() * body.volume()), 1.0 / p);
}

}  // namespace orlicz
