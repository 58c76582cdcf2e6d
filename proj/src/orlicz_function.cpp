#include "orlicz/orlicz_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "orlicz/hull.hpp"
#include "orlicz/random.hpp"

namespace orlicz {
namespace {

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- ScalarConvex

ScalarConvex ScalarConvex::power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::InvalidSpec, "power exponent must be >= 1");
  ScalarConvex f;
  f.kind_ = Kind::Power;
  f.p_ = p;
  return f;
}

ScalarConvex ScalarConvex::exp_minus_one() {
  ScalarConvex f;
  f.kind_ = Kind::ExpMinusOne;
  f.p_ = std::numeric_limits<double>::quiet_NaN();
  return f;
}

ScalarConvex ScalarConvex::piecewise_linear(std::vector<double> breakpoints, std::vector<double> slopes) {
  if (slopes.size() != breakpoints.size() + 1) {
    fail(ErrorCode::InvalidSpec, "piecewise-linear phi needs one more slope than breakpoints");
  }
  if (!(slopes[0] > 0.0)) fail(ErrorCode::InvalidSpec, "first slope must be positive");
  for (std::size_t j = 1; j < slopes.size(); ++j)
    if (!(slopes[j] >= slopes[j - 1])) fail(ErrorCode::InvalidSpec, "slopes must be nondecreasing");
  for (std::size_t j = 0; j < breakpoints.size(); ++j) {
    if (!(breakpoints[j] > 0.0)) fail(ErrorCode::InvalidSpec, "breakpoints must be positive");
    if (j > 0 && !(breakpoints[j] > breakpoints[j - 1])) fail(ErrorCode::InvalidSpec, "breakpoints must increase");
  }
  ScalarConvex f;
  f.kind_ = Kind::PiecewiseLinear;
  f.p_ = std::numeric_limits<double>::quiet_NaN();
  f.breakpoints_ = std::move(breakpoints);
  f.slopes_ = std::move(slopes);
  return f;
}

bool ScalarConvex::strictly_convex() const noexcept {
  switch (kind_) {
    case Kind::Power: return p_ > 1.0;
    case Kind::ExpMinusOne: return true;
    case Kind::PiecewiseLinear: return false;
  }
  return false;
}

double ScalarConvex::operator()(double t) const {
  switch (kind_) {
    case Kind::Power:
      if (p_ == 1.0) return t;
      if (p_ == 2.0) return t * t;
      return std::pow(t, p_);
    case Kind::ExpMinusOne: return std::expm1(t);
    case Kind::PiecewiseLinear: {
      double v = slopes_[0] * t;
      for (std::size_t j = 0; j < breakpoints_.size(); ++j)
        v += (slopes_[j + 1] - slopes_[j]) * std::max(0.0, t - breakpoints_[j]);
      return v;
    }
  }
  return 0.0;
}

double ScalarConvex::weighted_sum(double t, const double* g, const double* c, std::size_t count) const {
  double sum = 0.0;
  switch (kind_) {
    case Kind::Power:
      if (p_ == 1.0) {
        for (std::size_t k = 0; k < count; ++k) sum += c[k] * (t * g[k]);
      } else if (p_ == 2.0) {
        for (std::size_t k = 0; k < count; ++k) {
          const double s = t * g[k];
          sum += c[k] * (s * s);
        }
      } else {
        for (std::size_t k = 0; k < count; ++k) sum += c[k] * std::pow(t * g[k], p_);
      }
      break;
    case Kind::ExpMinusOne:
      for (std::size_t k = 0; k < count; ++k) sum += c[k] * std::expm1(t * g[k]);
      break;
    case Kind::PiecewiseLinear:
      for (std::size_t k = 0; k < count; ++k) sum += c[k] * (*this)(t * g[k]);
      break;
  }
  return sum;
}

std::string ScalarConvex::name() const {
  switch (kind_) {
    case Kind::Power: return "t^" + format_number(p_);
    case Kind::ExpMinusOne: return "exp(t)-1";
    case Kind::PiecewiseLinear: return "piecewise_linear";
  }
  return "?";
}

// ---------------------------------------------------------------------- QBody

QBody QBody::from_vertices(const std::vector<Vec>& vertices) {
  if (vertices.empty()) fail(ErrorCode::InvalidSpec, "Q needs vertices");
  const int m = static_cast<int>(vertices.front().size());
  if (m < 1) fail(ErrorCode::InvalidSpec, "Q vertices must be nonempty vectors");
  for (const auto& v : vertices) {
    if (v.size() != m) fail(ErrorCode::InvalidSpec, "Q vertices of mixed dimension");
    if (!v.allFinite()) fail(ErrorCode::InvalidSpec, "Q vertex is not finite");
  }
  QBody q;
  q.m_ = m;
  if (m == 1) {
    double lo = vertices[0][0], hi = vertices[0][0];
    for (const auto& v : vertices) lo = std::min(lo, v[0]), hi = std::max(hi, v[0]);
    if (!(hi > lo)) fail(ErrorCode::InvalidSpec, "Q has empty interior");
    if (lo > 1e-12 || hi < -1e-12) fail(ErrorCode::InvalidSpec, "Q does not contain the origin");
    q.vertices_ = {Vec::Constant(1, lo), Vec::Constant(1, hi)};
  } else {
    hull::HullResult h;
    try {
      h = hull::convex_hull(vertices);
    } catch (const Error& e) {
      fail(ErrorCode::InvalidSpec, std::string("Q has empty interior: ") + e.what());
    }
    for (const auto& f : h.faces)
      if (f.offset < -1e-12) fail(ErrorCode::InvalidSpec, "Q does not contain the origin");
    q.vertices_ = std::move(h.vertices);
  }
  q.symmetric_ = std::all_of(q.vertices_.begin(), q.vertices_.end(), [&](const Vec& v) {
    return std::any_of(q.vertices_.begin(), q.vertices_.end(), [&](const Vec& w) { return (v + w).norm() <= 1e-12; });
  });
  return q;
}

QBody QBody::unit_interval() { return from_vertices({Vec::Zero(1), Vec::Ones(1)}); }

QBody QBody::delta(int m) {
  if (m < 1) fail(ErrorCode::InvalidSpec, "delta needs m >= 1");
  std::vector<Vec> v{Vec::Zero(m)};
  for (int i = 0; i < m; ++i) v.push_back(-Vec::Unit(m, i));
  return from_vertices(v);
}

double QBody::support(const double* z) const {
  double best = 0.0;  // o is in Q
  for (const auto& v : vertices_) {
    double s = 0.0;
    for (int j = 0; j < m_; ++j) s += v[j] * z[j];
    best = std::max(best, s);
  }
  return best;
}

// ------------------------------------------------------------- OrliczFunction

OrliczFunction OrliczFunction::abs_power(double p, int m) {
  if (m < 1) fail(ErrorCode::InvalidSpec, "m must be >= 1");
  OrliczFunction f;
  f.kind_ = Kind::AbsPower;
  f.m_ = m;
  f.profile_ = ScalarConvex::power(p);
  f.strictly_convex_ = p > 1.0;
  f.even_ = true;
  return f;
}

OrliczFunction OrliczFunction::pos_part_power(double p, int m) {
  if (m < 1) fail(ErrorCode::InvalidSpec, "m must be >= 1");
  OrliczFunction f;
  f.kind_ = Kind::PosPartPower;
  f.m_ = m;
  f.profile_ = ScalarConvex::power(p);
  return f;
}

OrliczFunction OrliczFunction::squared_norm(int m) {
  if (m < 1) fail(ErrorCode::InvalidSpec, "m must be >= 1");
  OrliczFunction f;
  f.kind_ = Kind::SquaredNorm;
  f.m_ = m;
  f.profile_ = ScalarConvex::power(2.0);
  f.strictly_convex_ = true;
  f.even_ = true;
  return f;
}

OrliczFunction OrliczFunction::composite(ScalarConvex phi, QBody q) {
  OrliczFunction f;
  f.kind_ = Kind::CompositeQ;
  f.m_ = q.m();
  f.profile_ = std::move(phi);
  f.even_ = q.symmetric();
  f.q_.push_back(std::move(q));
  return f;
}

OrliczFunction OrliczFunction::max_affine(std::vector<AffinePiece> pieces) {
  if (pieces.empty()) fail(ErrorCode::InvalidSpec, "max_affine needs at least one piece");
  const int m = static_cast<int>(pieces.front().slope.size());
  if (m < 1) fail(ErrorCode::InvalidSpec, "max_affine slopes must be nonempty");
  bool homogeneous = true;
  for (const auto& piece : pieces) {
    if (piece.slope.size() != m) fail(ErrorCode::InvalidSpec, "max_affine slopes of mixed dimension");
    if (!piece.slope.allFinite() || !std::isfinite(piece.intercept)) {
      fail(ErrorCode::InvalidSpec, "max_affine piece is not finite");
    }
    if (piece.intercept > 0.0) fail(ErrorCode::InvalidSpec, "positive intercept would give Phi(o) > 0");
    if (piece.intercept != 0.0) homogeneous = false;
  }
  OrliczFunction f;
  f.kind_ = Kind::MaxAffine;
  f.m_ = m;
  f.profile_ = ScalarConvex::power(1.0);
  f.has_gauge_ = homogeneous;
  f.even_ = std::all_of(pieces.begin(), pieces.end(), [&](const AffinePiece& a) {
    return std::any_of(pieces.begin(), pieces.end(), [&](const AffinePiece& b) {
      return (a.slope + b.slope).norm() <= 1e-12 && a.intercept == b.intercept;
    });
  });
  f.pieces_ = std::move(pieces);
  return f;
}

const QBody& OrliczFunction::q() const {
  if (q_.empty()) fail(ErrorCode::InvalidSpec, "Phi is not of composite kind");
  return q_.front();
}

double OrliczFunction::gauge(const double* z) const {
  switch (kind_) {
    case Kind::AbsPower:
    case Kind::SquaredNorm: {
      if (m_ == 1) return std::abs(z[0]);
      double s = 0.0;
      for (int j = 0; j < m_; ++j) s += z[j] * z[j];
      return std::sqrt(s);
    }
    case Kind::PosPartPower: {
      if (m_ == 1) return std::max(0.0, z[0]);
      double s = 0.0;
      for (int j = 0; j < m_; ++j) s += z[j] > 0 ? z[j] * z[j] : 0.0;
      return std::sqrt(s);
    }
    case Kind::CompositeQ: return q_.front().support(z);
    case Kind::MaxAffine: {
      double best = 0.0;
      for (const auto& piece : pieces_) {
        double s = piece.intercept;
        for (int j = 0; j < m_; ++j) s += piece.slope[j] * z[j];
        best = std::max(best, s);
      }
      return best;
    }
  }
  return 0.0;
}

double OrliczFunction::operator()(const double* z) const {
  if (kind_ == Kind::MaxAffine) return gauge(z);  // max{0, ...} is Phi itself
  return profile_(gauge(z));
}

double OrliczFunction::operator()(const Vec& z) const {
  if (z.size() != m_) fail(ErrorCode::ShapeMismatch, "Phi argument has the wrong dimension");
  return (*this)(z.data());
}

double OrliczFunction::weighted_sum(double t, const double* y, const double* c, std::size_t count) const {
  std::vector<double> z(m_);
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    for (int j = 0; j < m_; ++j) z[j] = t * y[k * m_ + j];
    sum += c[k] * (*this)(z.data());
  }
  return sum;
}

std::string OrliczFunction::name() const {
  const std::string suffix = m_ > 1 ? ",m=" + std::to_string(m_) : "";
  switch (kind_) {
    case Kind::AbsPower: return "abs_power(p=" + format_number(exponent()) + suffix + ")";
    case Kind::PosPartPower: return "pos_part_power(p=" + format_number(exponent()) + suffix + ")";
    case Kind::SquaredNorm: return "squared_norm(m=" + std::to_string(m_) + ")";
    case Kind::CompositeQ: return "composite(" + profile_.name() + ",m=" + std::to_string(m_) + ")";
    case Kind::MaxAffine: return "max_affine(" + std::to_string(pieces_.size()) + " pieces" + suffix + ")";
  }
  return "?";
}

// ------------------------------------------------------------- check_class_C

ClassCReport check_class_C(const std::function<double(const Vec&)>& phi, int m, int samples, std::uint64_t seed) {
  if (samples < 100) fail(ErrorCode::InvalidSpec, "class-C check needs at least 100 samples");
  ClassCReport report;
  report.phi_at_origin = phi(Vec::Zero(m));
  report.min_symmetric_sum = std::numeric_limits<double>::infinity();
  report.min_coercivity_ratio = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vec u = rng.unit_vector(m);
    const double fu = phi(u);
    report.min_symmetric_sum = std::min(report.min_symmetric_sum, fu + phi(-u));
    if (fu > 0.0) {
      for (double r : {2.0, 10.0, 100.0}) report.min_coercivity_ratio = std::min(report.min_coercivity_ratio, phi(r * u) / (r * fu));
    }

    const Vec a = 2.0 * rng.normal_vector(m);
    const Vec b = 2.0 * rng.normal_vector(m);
    const double lambda = rng.uniform(0.0, 1.0);
    const double defect = phi(lambda * a + (1.0 - lambda) * b) - (lambda * phi(a) + (1.0 - lambda) * phi(b));
    report.worst_convexity_defect = std::max(report.worst_convexity_defect, defect);
  }
  if (!std::isfinite(report.min_coercivity_ratio)) report.min_coercivity_ratio = 0.0;
  report.pass = report.phi_at_origin == 0.0 && report.min_symmetric_sum > 0.0 &&
                report.worst_convexity_defect <= 1e-10;
  return report;
}

ClassCReport check_class_C(const OrliczFunction& phi, int samples, std::uint64_t seed) {
  return check_class_C([&](const Vec& z) { return phi(z); }, phi.m(), samples, seed);
}

}  // namespace orlicz
