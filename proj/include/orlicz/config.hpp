#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "orlicz/body.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/symmetrization.hpp"

namespace orlicz {

using Json = nlohmann::json;

/// Body spec:
///   {"kind":"polytope","n":2,"vertices":[[...],...]}
///   {"kind":"ball","n":3,"radius":1.0}
///   {"kind":"named","name":"square|cube|simplex|cross","n":2,"scale":1.0}
///   {"kind":"random","n":3,"k":12,"seed":5}
Body parse_body(const Json& spec);
Json body_to_json(const Body& body);

/// Phi spec:
///   {"kind":"abs_power","p":1,"m":1} | {"kind":"pos_part_power","p":2}
///   {"kind":"squared_norm","m":2}
///   {"kind":"composite","phi":{"kind":"power","p":1},"Q":{"vertices":[[0,0],[-1,0],[0,-1]]}}
///   {"kind":"max_affine","pieces":[{"slope":[1],"intercept":0},...]}
/// Scalar phi: power(p), exp_minus_one, piecewise_linear(breakpoints, slopes).
/// Q may also be {"kind":"delta","m":2} or {"kind":"unit_interval"}.
OrliczFunction parse_phi(const Json& spec);
ScalarConvex parse_scalar(const Json& spec);
QBody parse_q(const Json& spec);
Json phi_to_json(const OrliczFunction& phi);

/// {"scheme":"grid"|"mc"|"lds"|"product","N":...,"seed":...}; missing fields
/// fall back to default_quadrature_spec(d).
QuadratureSpec parse_quadrature(const Json& spec, int d);
Json quadrature_to_json(const QuadratureSpec& spec);

/// {"kind":"random","seed":s} | {"kind":"axes"} | {"kind":"list","vectors":[...]}
DirectionSequence parse_directions(const Json& spec);

Vec parse_vector(const Json& values);
Mat parse_matrix(const Json& rows);

struct Tolerances {
  double gamma_rel = 0.01;
  double inclusion = 1e-7;
  double oracle = 1e-8;
  double invariance = 3.0;  // multiple of the combined error estimate
};

/// Experiment configuration. Experiment-specific keys stay available in raw.
struct ExperimentConfig {
  std::string id;
  int n = 2;
  int m = 1;
  std::vector<Json> bodies;
  std::vector<Json> phis;
  std::optional<Json> quadrature;
  std::optional<Json> ball_quadrature;
  int trials = 1;
  std::uint64_t seed = 0;
  Tolerances tol;
  Json raw;

  QuadratureSpec polar_spec() const;  // on S^{nm-1}
  std::optional<QuadratureSpec> ball_spec() const;  // on S^{n-1}
};

ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);
Json load_json(const std::string& path);

}  // namespace orlicz
