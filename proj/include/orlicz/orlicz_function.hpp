#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orlicz/linalg.hpp"

namespace orlicz {

/// Convex, strictly increasing phi : [0, inf) -> [0, inf) with phi(0) = 0.
class ScalarConvex {
 public:
  enum class Kind { Power, ExpMinusOne, PiecewiseLinear };

  static ScalarConvex power(double p);
  static ScalarConvex exp_minus_one();
  /// phi(t) = s_0 t + sum_j (s_j - s_{j-1}) (t - b_j)^+ with 0 < b_1 < ... and
  /// 0 < s_0 <= s_1 <= ...; slopes has one more entry than breakpoints.
  static ScalarConvex piecewise_linear(std::vector<double> breakpoints, std::vector<double> slopes);

  Kind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return p_; }
  bool strictly_convex() const noexcept;
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& slopes() const noexcept { return slopes_; }

  double operator()(double t) const;

  /// sum_k c_k phi(t g_k).
  double weighted_sum(double t, const double* g, const double* c, std::size_t count) const;

  std::string name() const;

 private:
  Kind kind_ = Kind::Power;
  double p_ = 1.0;
  std::vector<double> breakpoints_;
  std::vector<double> slopes_;
};

/// Polytope Q in R^m containing the origin (boundary allowed). h_Q is the
/// exact maximum over the vertices.
class QBody {
 public:
  static QBody from_vertices(const std::vector<Vec>& vertices);
  /// [0, 1] in R^1.
  static QBody unit_interval();
  /// conv{o, -e_1, ..., -e_m}.
  static QBody delta(int m);

  int m() const noexcept { return m_; }
  const std::vector<Vec>& vertices() const noexcept { return vertices_; }
  bool symmetric() const noexcept { return symmetric_; }

  double support(const double* z) const;
  double support(const Vec& z) const { return support(z.data()); }

 private:
  int m_ = 1;
  std::vector<Vec> vertices_;
  bool symmetric_ = false;
};

struct AffinePiece {
  Vec slope;
  double intercept = 0.0;  // must be <= 0
};

/// Phi : R^m -> [0, inf) in the class C (convex, Phi(o) = 0, Phi(z) + Phi(-z) > 0
/// off the origin). The kinds form a closed union.
///
/// Every kind except MaxAffine with a negative intercept factors as
/// Phi(z) = phi(g(z)) with g positively 1-homogeneous; the solver uses that
/// factorization to evaluate g once per direction.
class OrliczFunction {
 public:
  enum class Kind { AbsPower, PosPartPower, SquaredNorm, CompositeQ, MaxAffine };

  /// |z|^p (Euclidean norm when m > 1).
  static OrliczFunction abs_power(double p, int m = 1);
  /// |z^+|^p with z^+ taken componentwise.
  static OrliczFunction pos_part_power(double p, int m = 1);
  static OrliczFunction squared_norm(int m = 1);
  static OrliczFunction composite(ScalarConvex phi, QBody q);
  /// max{0, max_k (s_k . z + c_k)}.
  static OrliczFunction max_affine(std::vector<AffinePiece> pieces);

  int m() const noexcept { return m_; }
  Kind kind() const noexcept { return kind_; }
  bool strictly_convex() const noexcept { return strictly_convex_; }
  bool even() const noexcept { return even_; }
  /// Exponent for the power kinds and for CompositeQ with a power profile.
  double exponent() const noexcept { return profile_.exponent(); }

  double operator()(const double* z) const;
  double operator()(const Vec& z) const;

  bool has_gauge() const noexcept { return has_gauge_; }
  double gauge(const double* z) const;
  const ScalarConvex& profile() const noexcept { return profile_; }
  const QBody& q() const;
  const std::vector<AffinePiece>& pieces() const noexcept { return pieces_; }

  /// sum_k c_k Phi(t y_k) with y_k stored row after row (m values each).
  double weighted_sum(double t, const double* y, const double* c, std::size_t count) const;

  std::string name() const;

 private:
  Kind kind_ = Kind::AbsPower;
  int m_ = 1;
  bool strictly_convex_ = false;
  bool even_ = false;
  bool has_gauge_ = true;
  ScalarConvex profile_;
  std::vector<QBody> q_;  // zero or one entry
  std::vector<AffinePiece> pieces_;
};

struct ClassCReport {
  double phi_at_origin = 0.0;
  double min_symmetric_sum = 0.0;       // min over sampled unit z of Phi(z) + Phi(-z)
  double worst_convexity_defect = 0.0;  // max of Phi(mix) - mix of Phi
  double min_coercivity_ratio = 0.0;    // min of Phi(r z) / (r Phi(z)), r in {2, 10, 100}
  bool pass = false;
};

/// Sampled class-C diagnostics: pass iff Phi(o) = 0, min symmetric sum > 0
/// and convexity defect <= 1e-10.
ClassCReport check_class_C(const OrliczFunction& phi, int samples = 1000, std::uint64_t seed = 0);
/// Same checks for an arbitrary evaluator on R^m.
ClassCReport check_class_C(const std::function<double(const Vec&)>& phi, int m, int samples = 1000,
                           std::uint64_t seed = 0);

}  // namespace orlicz
