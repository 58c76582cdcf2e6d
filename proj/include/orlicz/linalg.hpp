#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "orlicz/error.hpp"

namespace orlicz {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Shape of the matrix space M_{n,m}. Points are stored as length n*m vectors
/// in column-major order: entry (i, j) lives at index j*n + i, so the vector
/// is the stacked columns x_1, ..., x_m. Eigen's default layout agrees.
struct MatrixShape {
  int n = 1;
  int m = 1;

  MatrixShape() = default;
  MatrixShape(int rows, int cols);

  int dim() const noexcept { return n * m; }
  bool operator==(const MatrixShape&) const = default;

  void require(const Vec& x) const;
};

inline Eigen::Map<const Mat> as_matrix(const Vec& x, const MatrixShape& shape) {
  return Eigen::Map<const Mat>(x.data(), shape.n, shape.m);
}

inline Vec flatten(const Mat& x) { return Eigen::Map<const Vec>(x.data(), x.size()); }

/// Unit-ball volume omega_d.
double unit_ball_volume(int d);
/// Surface area of S^{d-1}.
double sphere_area(int d);

/// Orthonormal basis of the complement of a unit vector, as columns of an
/// n x (n-1) matrix.
Mat orthonormal_complement(const Vec& v);

/// Fixed-order pairwise summation; the result depends only on the order of
/// the input, never on how it was produced.
double pairwise_sum(const double* data, std::size_t count);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace orlicz
