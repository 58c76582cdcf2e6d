#include "orlicz/quadrature.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "orlicz/random.hpp"

namespace orlicz {
namespace {

constexpr std::array<int, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

double inverse_normal_cdf(double u) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u); }

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

std::string to_string(QuadratureScheme scheme) {
  switch (scheme) {
    case QuadratureScheme::Grid: return "grid";
    case QuadratureScheme::MonteCarlo: return "mc";
    case QuadratureScheme::LowDiscrepancy: return "lds";
    case QuadratureScheme::Product: return "product";
  }
  return "unknown";
}

QuadratureScheme parse_scheme(const std::string& name) {
  if (name == "grid") return QuadratureScheme::Grid;
  if (name == "mc") return QuadratureScheme::MonteCarlo;
  if (name == "lds") return QuadratureScheme::LowDiscrepancy;
  if (name == "product") return QuadratureScheme::Product;
  fail(ErrorCode::InvalidScheme, "unknown quadrature scheme '" + name + "'");
}

SphereQuadrature::SphereQuadrature(int dim, Mat nodes, std::vector<double> weights, QuadratureSpec spec)
    : dim_(dim), nodes_(std::move(nodes)), weights_(std::move(weights)), spec_(spec) {}

QuadratureEstimate SphereQuadrature::integrate(const std::vector<double>& values) const {
  if (values.size() != weights_.size()) fail(ErrorCode::ShapeMismatch, "one value per quadrature node expected");
  const std::size_t n = values.size();
  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k) terms[k] = weights_[k] * values[k];
  QuadratureEstimate est;
  est.value = pairwise_sum(terms);

  switch (spec_.scheme) {
    case QuadratureScheme::Grid:
    case QuadratureScheme::Product: {
      // Half-resolution rule: even-indexed nodes with doubled weight.
      std::vector<double> coarse;
      coarse.reserve(n / 2 + 1);
      for (std::size_t k = 0; k < n; k += 2) coarse.push_back(2.0 * terms[k]);
      est.error = std::abs(est.value - pairwise_sum(coarse));
      break;
    }
    case QuadratureScheme::MonteCarlo: {
      const double mean = est.value / static_cast<double>(n);
      std::vector<double> sq(n);
      for (std::size_t k = 0; k < n; ++k) sq[k] = (terms[k] - mean) * (terms[k] - mean);
      const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
      est.error = std::sqrt(var * static_cast<double>(n));
      break;
    }
    case QuadratureScheme::LowDiscrepancy: {
      const int g = std::max(2, spec_.replicas);
      std::vector<double> block_estimates;
      for (int b = 0; b < g; ++b) {
        const std::size_t lo = n * b / g, hi = n * (b + 1) / g;
        const double scale = static_cast<double>(n) / static_cast<double>(hi - lo);
        block_estimates.push_back(scale * pairwise_sum(terms.data() + lo, hi - lo));
      }
      double mean = 0.0;
      for (double v : block_estimates) mean += v;
      mean /= g;
      double var = 0.0;
      for (double v : block_estimates) var += (v - mean) * (v - mean);
      var /= (g - 1);
      est.error = std::sqrt(var / g);
      break;
    }
  }
  return est;
}

SphereQuadrature make_quadrature(int d, const QuadratureSpec& spec) {
  if (d < 2) fail(ErrorCode::InvalidScheme, "sphere dimension must be >= 2");
  if (spec.nodes < 64) fail(ErrorCode::InvalidScheme, "at least 64 nodes required");
  const std::size_t n = spec.nodes;
  const double area = sphere_area(d);
  Mat nodes(d, static_cast<Eigen::Index>(n));
  std::vector<double> weights(n, area / static_cast<double>(n));

  switch (spec.scheme) {
    case QuadratureScheme::Grid: {
      if (d != 2) fail(ErrorCode::InvalidScheme, "angular grid is only defined on the circle");
      for (std::size_t k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        nodes(0, k) = std::cos(theta);
        nodes(1, k) = std::sin(theta);
      }
      break;
    }
    case QuadratureScheme::MonteCarlo: {
      Rng rng(spec.seed);
      for (std::size_t k = 0; k < n; ++k) nodes.col(k) = rng.unit_vector(d);
      break;
    }
    case QuadratureScheme::LowDiscrepancy: {
      if (d > static_cast<int>(kPrimes.size())) fail(ErrorCode::InvalidScheme, "low-discrepancy dimension too large");
      const int g = std::max(2, spec.replicas);
      if (n < static_cast<std::size_t>(g) * 8) fail(ErrorCode::InvalidScheme, "too few nodes per replica");
      Rng rng(spec.seed);
      for (int b = 0; b < g; ++b) {
        const std::size_t lo = n * b / g, hi = n * (b + 1) / g;
        Vec shift(d);
        for (int j = 0; j < d; ++j) shift[j] = rng.uniform();
        for (std::size_t k = lo; k < hi; ++k) {
          Vec x(d);
          for (int j = 0; j < d; ++j) {
            double u = radical_inverse(k - lo + 1, kPrimes[j]) + shift[j];
            u -= std::floor(u);
            u = std::clamp(u, 1e-15, 1.0 - 1e-15);
            x[j] = inverse_normal_cdf(u);
          }
          const double r = x.norm();
          nodes.col(k) = r > 0 ? Vec(x / r) : Vec::Unit(d, 0);
        }
      }
      break;
    }
    case QuadratureScheme::Product: {
      if (d != 3) fail(ErrorCode::InvalidScheme, "product rule is only defined on S^2");
      const int polar = std::max(2, spec.polar_nodes);
      if (n % polar != 0) fail(ErrorCode::InvalidScheme, "node count must be a multiple of the polar count");
      const std::size_t azimuth = n / polar;
      if (azimuth % 2 != 0) fail(ErrorCode::InvalidScheme, "azimuthal count must be even");
      std::vector<double> gx, gw;
      gauss_legendre(polar, gx, gw);
      double total = 0.0;
      for (int i = 0; i < polar; ++i) {
        // Nodes in the polar angle psi in [0, pi] with the sin(psi) Jacobian.
        const double psi = 0.5 * std::numbers::pi * (gx[i] + 1.0);
        const double wpsi = 0.5 * std::numbers::pi * gw[i] * std::sin(psi);
        for (std::size_t a = 0; a < azimuth; ++a) {
          const double alpha = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(azimuth);
          const std::size_t k = i * azimuth + a;
          nodes(0, k) = std::sin(psi) * std::cos(alpha);
          nodes(1, k) = std::sin(psi) * std::sin(alpha);
          nodes(2, k) = std::cos(psi);
          weights[k] = wpsi * 2.0 * std::numbers::pi / static_cast<double>(azimuth);
          total += weights[k];
        }
      }
      for (auto& w : weights) w *= area / total;
      break;
    }
  }
  return SphereQuadrature(d, std::move(nodes), std::move(weights), spec);
}

QuadratureSpec default_quadrature_spec(int d, std::uint64_t seed) {
  QuadratureSpec spec;
  spec.seed = seed;
  if (d == 2) {
    spec.scheme = QuadratureScheme::Grid;
    spec.nodes = 8192;
  } else {
    spec.scheme = QuadratureScheme::LowDiscrepancy;
    spec.nodes = d <= 4 ? 200000 : 1000000;
  }
  return spec;
}

QuadratureSpec default_ball_measure_spec(int n, std::uint64_t seed) {
  QuadratureSpec spec;
  spec.seed = seed;
  if (n == 2) {
    spec.scheme = QuadratureScheme::Grid;
    spec.nodes = 4096;
  } else if (n == 3) {
    spec.scheme = QuadratureScheme::Product;
    spec.nodes = 4096;
    spec.polar_nodes = 16;
  } else {
    spec.scheme = QuadratureScheme::LowDiscrepancy;
    spec.nodes = 200000;
  }
  return spec;
}

}  // namespace orlicz
