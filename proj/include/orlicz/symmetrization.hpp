#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "orlicz/body.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/projection_body.hpp"

namespace orlicz {

/// K = {z + tau v : -f1(z) <= tau <= f2(z)} over the projection of K onto
/// v^perp. Points z are given in the coordinates of basis() (n x (n-1),
/// orthonormal columns spanning v^perp).
class ChordFunctions {
 public:
  ChordFunctions(const PolytopeBody& body, const Vec& v);

  const Vec& direction() const noexcept { return v_; }
  const Mat& basis() const noexcept { return basis_; }

  struct Chord {
    double lower = 0.0;  // -f1(z)
    double upper = 0.0;  // f2(z)
    // <f_j>(z) = f_j(z) - grad f_j(z) . z on the facet active at z; for a
    // facet with normal u and support h this is h / |u . v|.
    double bracket_f1 = 0.0;
    double bracket_f2 = 0.0;
  };

  /// Chord over z, or nothing when z is outside the projected domain
  /// (beyond 1e-12).
  std::optional<Chord> chord(const Vec& z) const;

 private:
  Vec v_;
  Mat basis_;
  std::vector<Vec> upper_normals_, lower_normals_;  // facets with u . v > 0 / < 0
  std::vector<double> upper_rhs_, lower_rhs_, upper_slope_, lower_slope_;
  std::vector<Vec> side_normals_;  // vertical facets, in basis coordinates
  std::vector<double> side_rhs_;
};

/// Exact Steiner symmetral S_v K for n = 2, 3. Candidate points are the
/// projected vertices (n = 2) plus all pairwise crossings of projected edges
/// (n = 3); the output is the hull of z +- l(z)/2 v after deduplication at
/// 1e-9. Throws UnsupportedDimension for n >= 4 and DegenerateDirection when
/// a facet is nearly but not exactly parallel to v.
PolytopeBody steiner(const PolytopeBody& body, const Vec& v);

/// Direction sequences: seeded random unit vectors, cycling coordinate axes,
/// or a cycled explicit list.
struct DirectionSequence {
  enum class Kind { Random, Axes, List };
  Kind kind = Kind::Random;
  std::uint64_t seed = 0;
  std::vector<Vec> vectors;

  /// Direction used at step (0-based).
  Vec at(int step, int n) const;
};

struct SteinerOptions {
  /// Caps the vertex count by dropping the least significant vertices and
  /// rescaling about the centroid to restore the volume. Exact Steiner steps
  /// roughly double the vertex count, so long runs need this.
  bool simplify = false;
  std::size_t max_vertices = 256;
  /// Also keep each raw S_v K_j (before simplification and re-centering).
  bool keep_raw = false;
};

struct SteinerStep {
  int iteration = 0;  // 0 is the (re-centered) input
  Vec direction;
  Vec translation;              // applied to re-center this iterate
  double volume = 0.0;
  double step_volume_drift = 0.0;  // |V(S_v K) - V(K)| / V(K), before simplification
  double hausdorff_to_ball = 0.0;  // to the centered ball of equal volume
  std::size_t vertices = 0;
  bool simplified = false;
};

struct SteinerTrajectory {
  double ball_radius = 0.0;  // c = (V_n(K) / omega_n)^{1/n}
  std::vector<PolytopeBody> bodies;
  std::vector<PolytopeBody> raw;  // raw[j-1] = S_v K_{j-1}, only with keep_raw
  std::vector<SteinerStep> steps;
};

/// Iterated Steiner symmetrization. The input is translated to put its
/// centroid at o, and every iterate is re-centered the same way; each
/// translation is recorded.
SteinerTrajectory iterate_steiner(const PolytopeBody& body, const DirectionSequence& directions, int iterations,
                                  const SteinerOptions& options = {});

/// Volume-preserving reduction to at most max_vertices vertices.
PolytopeBody simplify_polytope(const PolytopeBody& body, std::size_t max_vertices);

using Membership = std::function<bool(const Vec&)>;

/// Samples of the fiber symmetral over one base point. The section is
/// C = {s in R^m : base + v s^T in L}; each ray emits base + v ((t - s')/2)^T
/// with t, s' in C found by bisection ray shooting from a point of C. Even
/// rays use the section boundary in opposite directions, odd rays random
/// interior points. Throws EmptySection when no point of C is found.
std::vector<Vec> fiber_section_symmetral(const Membership& membership, const MatrixShape& shape, const Vec& v,
                                         const Vec& base, int rays, std::uint64_t seed, double ray_tol = 1e-10);

struct InclusionReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;  // max of h_{Pi S_v K}(x) - 1 over samples
  double tolerance = 0.0;
  bool pass = false;
};

/// Checks that fiber-symmetral samples of Pi_Phi^{m,*} K lie in
/// Pi_Phi^{m,*} S_v K. Bases are random points of the polar body inside
/// V^m(v) = {x : v^T X = o}.
InclusionReport check_inclusion(const PolytopeBody& body, const OrliczFunction& phi, const Vec& v, int bases,
                                int rays, std::uint64_t seed, double tol = 1e-7, unsigned threads = 0);

}  // namespace orlicz
