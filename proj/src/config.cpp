#include "orlicz/config.hpp"

#include <fstream>
#include <sstream>

namespace orlicz {
namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string(what) + ": " + e.what());
  }
}

std::string kind_of(const Json& spec) {
  if (!spec.is_object()) fail(ErrorCode::InvalidSpec, "spec must be a JSON object");
  if (!spec.contains("kind")) fail(ErrorCode::InvalidSpec, "spec lacks a \"kind\" field");
  return spec.at("kind").get<std::string>();
}

std::vector<Vec> parse_points(const Json& rows) {
  if (!rows.is_array() || rows.empty()) fail(ErrorCode::InvalidSpec, "expected a nonempty array of points");
  std::vector<Vec> out;
  for (const auto& r : rows) out.push_back(parse_vector(r));
  return out;
}

Json vector_to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

Vec parse_vector(const Json& values) {
  return guarded("vector", [&] {
    if (!values.is_array() || values.empty()) fail(ErrorCode::InvalidSpec, "expected a nonempty numeric array");
    Vec v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i].get<double>();
    return v;
  });
}

Mat parse_matrix(const Json& rows) {
  const auto pts = parse_points(rows);
  Mat a(static_cast<Eigen::Index>(pts.size()), pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].size() != a.cols()) fail(ErrorCode::InvalidSpec, "matrix rows differ in length");
    a.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  }
  return a;
}

Body parse_body(const Json& spec) {
  return guarded("body spec", [&]() -> Body {
    const std::string kind = kind_of(spec);
    if (kind == "polytope") {
      const auto pts = parse_points(spec.at("vertices"));
      if (spec.contains("n") && spec.at("n").get<int>() != pts.front().size()) {
        fail(ErrorCode::ShapeMismatch, "vertex dimension differs from n");
      }
      return PolytopeBody::from_vertices(pts);
    }
    if (kind == "ball") return BallBody(spec.at("n").get<int>(), spec.value("radius", 1.0));
    if (kind == "named") {
      return named_body(spec.at("name").get<std::string>(), spec.at("n").get<int>(), spec.value("scale", 1.0));
    }
    if (kind == "random") {
      const int n = spec.at("n").get<int>();
      return random_polytope(n, spec.value("k", n == 2 ? 7 : 12), spec.value("seed", std::uint64_t{0}));
    }
    fail(ErrorCode::InvalidSpec, "unknown body kind '" + kind + "'");
  });
}

Json body_to_json(const Body& body) {
  if (const auto* ball = std::get_if<BallBody>(&body)) {
    return {{"kind", "ball"}, {"n", ball->dim()}, {"radius", ball->radius()}, {"volume", ball->volume()}};
  }
  const auto& poly = std::get<PolytopeBody>(body);
  Json verts = Json::array();
  for (const auto& v : poly.vertices()) verts.push_back(vector_to_json(v));
  Json facets = Json::array();
  for (const auto& f : poly.facets()) {
    facets.push_back({{"normal", vector_to_json(f.normal)}, {"area", f.area}, {"support", f.support}});
  }
  return {{"kind", "polytope"}, {"n", poly.dim()}, {"vertices", verts}, {"facets", facets}, {"volume", poly.volume()},
          {"centroid", vector_to_json(poly.centroid())}};
}

ScalarConvex parse_scalar(const Json& spec) {
  return guarded("scalar phi spec", [&] {
    const std::string kind = kind_of(spec);
    if (kind == "power") return ScalarConvex::power(spec.at("p").get<double>());
    if (kind == "exp_minus_one") return ScalarConvex::exp_minus_one();
    if (kind == "piecewise_linear") {
      return ScalarConvex::piecewise_linear(spec.at("breakpoints").get<std::vector<double>>(),
                                            spec.at("slopes").get<std::vector<double>>());
    }
    fail(ErrorCode::InvalidSpec, "unknown scalar phi kind '" + kind + "'");
  });
}

QBody parse_q(const Json& spec) {
  return guarded("Q spec", [&] {
    if (spec.contains("vertices")) return QBody::from_vertices(parse_points(spec.at("vertices")));
    const std::string kind = kind_of(spec);
    if (kind == "delta") return QBody::delta(spec.at("m").get<int>());
    if (kind == "unit_interval") return QBody::unit_interval();
    fail(ErrorCode::InvalidSpec, "unknown Q kind '" + kind + "'");
  });
}

OrliczFunction parse_phi(const Json& spec) {
  return guarded("phi spec", [&] {
    const std::string kind = kind_of(spec);
    const int m = spec.value("m", 1);
    if (kind == "abs_power") return OrliczFunction::abs_power(spec.at("p").get<double>(), m);
    if (kind == "pos_part_power") return OrliczFunction::pos_part_power(spec.at("p").get<double>(), m);
    if (kind == "squared_norm") return OrliczFunction::squared_norm(m);
    if (kind == "composite") return OrliczFunction::composite(parse_scalar(spec.at("phi")), parse_q(spec.at("Q")));
    if (kind == "max_affine") {
      std::vector<AffinePiece> pieces;
      for (const auto& p : spec.at("pieces")) pieces.push_back({parse_vector(p.at("slope")), p.value("intercept", 0.0)});
      return OrliczFunction::max_affine(std::move(pieces));
    }
    fail(ErrorCode::InvalidSpec, "unknown phi kind '" + kind + "'");
  });
}

Json phi_to_json(const OrliczFunction& phi) {
  Json j;
  switch (phi.kind()) {
    case OrliczFunction::Kind::AbsPower: j = {{"kind", "abs_power"}, {"p", phi.exponent()}}; break;
    case OrliczFunction::Kind::PosPartPower: j = {{"kind", "pos_part_power"}, {"p", phi.exponent()}}; break;
    case OrliczFunction::Kind::SquaredNorm: j = {{"kind", "squared_norm"}}; break;
    case OrliczFunction::Kind::CompositeQ: {
      const ScalarConvex& s = phi.profile();
      Json sj;
      switch (s.kind()) {
        case ScalarConvex::Kind::Power: sj = {{"kind", "power"}, {"p", s.exponent()}}; break;
        case ScalarConvex::Kind::ExpMinusOne: sj = {{"kind", "exp_minus_one"}}; break;
        case ScalarConvex::Kind::PiecewiseLinear:
          sj = {{"kind", "piecewise_linear"}, {"breakpoints", s.breakpoints()}, {"slopes", s.slopes()}};
          break;
      }
      Json verts = Json::array();
      for (const auto& v : phi.q().vertices()) verts.push_back(vector_to_json(v));
      j = {{"kind", "composite"}, {"phi", sj}, {"Q", {{"vertices", verts}}}};
      break;
    }
    case OrliczFunction::Kind::MaxAffine: {
      Json pieces = Json::array();
      for (const auto& p : phi.pieces()) pieces.push_back({{"slope", vector_to_json(p.slope)}, {"intercept", p.intercept}});
      j = {{"kind", "max_affine"}, {"pieces", pieces}};
      break;
    }
  }
  j["m"] = phi.m();
  j["strictly_convex"] = phi.strictly_convex();
  j["even"] = phi.even();
  return j;
}

QuadratureSpec parse_quadrature(const Json& spec, int d) {
  return guarded("quadrature spec", [&] {
    QuadratureSpec q = default_quadrature_spec(d, spec.value("seed", std::uint64_t{0}));
    if (spec.contains("scheme")) q.scheme = parse_scheme(spec.at("scheme").get<std::string>());
    if (spec.contains("N")) q.nodes = spec.at("N").get<std::size_t>();
    if (spec.contains("replicas")) q.replicas = spec.at("replicas").get<int>();
    if (spec.contains("polar_nodes")) q.polar_nodes = spec.at("polar_nodes").get<int>();
    return q;
  });
}

Json quadrature_to_json(const QuadratureSpec& spec) {
  Json j = {{"scheme", to_string(spec.scheme)}, {"N", spec.nodes}, {"seed", spec.seed}};
  if (spec.scheme == QuadratureScheme::LowDiscrepancy) j["replicas"] = spec.replicas;
  if (spec.scheme == QuadratureScheme::Product) j["polar_nodes"] = spec.polar_nodes;
  return j;
}

DirectionSequence parse_directions(const Json& spec) {
  return guarded("direction spec", [&] {
    DirectionSequence seq;
    const std::string kind = kind_of(spec);
    if (kind == "random") {
      seq.kind = DirectionSequence::Kind::Random;
      seq.seed = spec.value("seed", std::uint64_t{0});
    } else if (kind == "axes") {
      seq.kind = DirectionSequence::Kind::Axes;
    } else if (kind == "list") {
      seq.kind = DirectionSequence::Kind::List;
      seq.vectors = parse_points(spec.at("vectors"));
    } else {
      fail(ErrorCode::InvalidSpec, "unknown direction kind '" + kind + "'");
    }
    return seq;
  });
}

QuadratureSpec ExperimentConfig::polar_spec() const {
  return quadrature ? parse_quadrature(*quadrature, n * m) : default_quadrature_spec(n * m, seed);
}

std::optional<QuadratureSpec> ExperimentConfig::ball_spec() const {
  if (!ball_quadrature) return std::nullopt;
  return parse_quadrature(*ball_quadrature, n);
}

ExperimentConfig parse_config(const Json& doc) {
  return guarded("experiment config", [&] {
    if (!doc.is_object()) fail(ErrorCode::InvalidSpec, "config must be a JSON object");
    ExperimentConfig c;
    c.raw = doc;
    c.id = doc.value("id", std::string("experiment"));
    c.n = doc.value("n", 2);
    c.m = doc.value("m", 1);
    if (c.n < 1 || c.m < 1) fail(ErrorCode::InvalidSpec, "n and m must be >= 1");
    if (doc.contains("body")) c.bodies.push_back(doc.at("body"));
    if (doc.contains("bodies")) {
      for (const auto& b : doc.at("bodies")) c.bodies.push_back(b);
    }
    auto with_m = [&](Json phi) {
      const std::string kind = kind_of(phi);
      if (kind != "composite" && kind != "max_affine" && !phi.contains("m")) phi["m"] = c.m;
      return phi;
    };
    if (doc.contains("phi")) c.phis.push_back(with_m(doc.at("phi")));
    if (doc.contains("phis")) {
      for (const auto& p : doc.at("phis")) c.phis.push_back(with_m(p));
    }
    if (doc.contains("quadrature")) c.quadrature = doc.at("quadrature");
    if (doc.contains("ball_quadrature")) c.ball_quadrature = doc.at("ball_quadrature");
    c.trials = doc.value("trials", 1);
    c.seed = doc.value("seed", std::uint64_t{0});
    if (c.trials < 1) fail(ErrorCode::InvalidSpec, "trials must be >= 1");
    if (doc.contains("tolerances")) {
      const Json& t = doc.at("tolerances");
      c.tol.gamma_rel = t.value("gamma_rel", c.tol.gamma_rel);
      c.tol.inclusion = t.value("inclusion", c.tol.inclusion);
      c.tol.oracle = t.value("oracle", c.tol.oracle);
      c.tol.invariance = t.value("invariance", c.tol.invariance);
    }
    for (double v : {c.tol.gamma_rel, c.tol.inclusion, c.tol.oracle, c.tol.invariance}) {
      if (!(v > 0.0)) fail(ErrorCode::InvalidSpec, "tolerances must be positive");
    }
    return c;
  });
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidSpec, "'" + path + "' is not valid JSON: " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return parse_config(load_json(path)); }

}  // namespace orlicz
