#include "orlicz/random.hpp"

namespace orlicz {

Mat random_rotation(int n, Rng& rng) {
  Mat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

Mat random_unimodular(int n, Rng& rng, double max_stretch, double max_shear) {
  Vec stretch(n);
  double log_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    stretch[i] = rng.uniform(-std::log(max_stretch), std::log(max_stretch));
    log_sum += stretch[i];
  }
  Mat d = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = std::exp(stretch[i] - log_sum / n);
  Mat shear = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) shear(i, j) = rng.uniform(-max_shear, max_shear);
  Mat a = random_rotation(n, rng) * d * shear * random_rotation(n, rng);
  // Remove the residual roundoff in the determinant.
  a /= std::pow(a.determinant(), 1.0 / n);
  return a;
}

}  // namespace orlicz
