#include "orlicz/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace orlicz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateHull: return "DegenerateHull";
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::MissingQuadrature: return "MissingQuadrature";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonPositiveSupport: return "NonPositiveSupport";
    case ErrorCode::InvalidScheme: return "InvalidScheme";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::EmptySection: return "EmptySection";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

MatrixShape::MatrixShape(int rows, int cols) : n(rows), m(cols) {
  if (rows < 1 || cols < 1) {
    fail(ErrorCode::ShapeMismatch, "matrix shape must have n >= 1 and m >= 1");
  }
}

void MatrixShape::require(const Vec& x) const {
  if (x.size() != dim()) {
    fail(ErrorCode::ShapeMismatch, "expected vector of length " + std::to_string(dim()) + ", got " +
                                       std::to_string(x.size()));
  }
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double sphere_area(int d) { return d * unit_ball_volume(d); }

Mat orthonormal_complement(const Vec& v) {
  const auto n = v.size();
  // Householder reflection taking v to +-e_0; its remaining columns span v-perp.
  Eigen::HouseholderQR<Mat> qr(v.normalized());
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - 1);
}

double pairwise_sum(const double* data, std::size_t count) {
  if (count <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += data[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

}  // namespace orlicz
