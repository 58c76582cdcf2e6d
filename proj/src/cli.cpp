#include "orlicz/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orlicz/config.hpp"
#include "orlicz/harness.hpp"
#include "orlicz/random.hpp"
#include "orlicz/surface_measure.hpp"

namespace orlicz::cli {
namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> nodes;
  std::string format = "json";
  unsigned threads = 0;
  bool no_timestamp = false;
  std::string track;
};

// Collects output lines and the worst verdict seen.
class Sink {
 public:
  explicit Sink(std::ostream& out) : out_(out) {}

  void line(const std::string& s) { out_ << s << '\n'; }
  void record(const Json& j) { line(j.dump()); }
  void verdict(const VerdictRecord& r, bool csv) {
    worst_ = worst_of(worst_, r.verdict);
    if (csv) {
      line("# verdict " + r.to_json().dump());
    } else {
      record(r.to_json());
    }
  }
  void verdict(Verdict v) { worst_ = worst_of(worst_, v); }
  Verdict worst() const { return worst_; }

 private:
  std::ostream& out_;
  Verdict worst_ = Verdict::Pass;
};

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

template <class T>
T raw_value(const ExperimentConfig& cfg, const char* key, T fallback) {
  try {
    return cfg.raw.value(key, fallback);
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("config key '") + key + "': " + e.what());
  }
}

std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

class Runner {
 public:
  Runner(const Options& opt, std::ostream& out) : opt_(opt), sink_(out) {}

  int run() {
    if (opt_.command == "selfcheck") {
      cfg_ = opt_.config_path.empty() ? parse_config(Json::object()) : load_config(opt_.config_path);
    } else {
      if (opt_.config_path.empty()) fail(ErrorCode::InvalidSpec, "--config is required for " + opt_.command);
      cfg_ = load_config(opt_.config_path);
    }
    if (opt_.seed) cfg_.seed = *opt_.seed;
    header();
    if (opt_.command == "body") body();
    else if (opt_.command == "phi-check") phi_check();
    else if (opt_.command == "support") support();
    else if (opt_.command == "gamma") gamma_cmd();
    else if (opt_.command == "verify-petty") petty();
    else if (opt_.command == "verify-affine") affine();
    else if (opt_.command == "verify-continuity") continuity();
    else if (opt_.command == "symmetrize") symmetrize();
    else if (opt_.command == "check-inclusion") inclusion();
    else if (opt_.command == "selfcheck") selfcheck();
    switch (sink_.worst()) {
      case Verdict::Pass: return 0;
      case Verdict::Fail: return 2;
      case Verdict::Inconclusive: return 3;
    }
    return 1;
  }

 private:
  bool csv() const { return opt_.format == "csv"; }

  HarnessSettings settings(int n, int m) const {
    HarnessSettings s;
    s.polar = cfg_.quadrature ? parse_quadrature(*cfg_.quadrature, n * m) : default_quadrature_spec(n * m, cfg_.seed);
    if (opt_.nodes) s.polar.nodes = *opt_.nodes;
    if (cfg_.ball_quadrature) s.ball = parse_quadrature(*cfg_.ball_quadrature, n);
    s.tol = cfg_.tol;
    s.threads = opt_.threads;
    s.seed = cfg_.seed;
    return s;
  }

  void header() {
    const HarnessSettings s = settings(cfg_.n, cfg_.m);
    Json h{{"type", "provenance"},
           {"version", kVersion},
           {"command", opt_.command},
           {"experiment", cfg_.id},
           {"config", opt_.config_path},
           {"seed", cfg_.seed},
           {"n", cfg_.n},
           {"m", cfg_.m},
           {"quadrature", quadrature_to_json(s.polar)},
           {"ball_quadrature", quadrature_to_json(s.ball.value_or(default_ball_measure_spec(cfg_.n)))}};
    if (!opt_.no_timestamp) h["timestamp"] = timestamp();
    if (csv()) {
      sink_.line("# " + h.dump());
    } else {
      sink_.record(h);
    }
  }

  // Random body specs without an explicit seed expand to one body per trial.
  std::vector<Body> bodies() const {
    if (cfg_.bodies.empty()) fail(ErrorCode::InvalidSpec, "config has no body");
    std::vector<Body> out;
    for (const Json& spec : cfg_.bodies) {
      if (spec.is_object() && spec.value("kind", "") == "random" && !spec.contains("seed")) {
        for (int t = 0; t < cfg_.trials; ++t) {
          Json s = spec;
          s["seed"] = derive_seed(cfg_.seed, static_cast<std::uint64_t>(out.size()));
          out.push_back(parse_body(s));
        }
      } else {
        out.push_back(parse_body(spec));
      }
    }
    return out;
  }

  std::vector<PolytopeBody> polytopes() const {
    std::vector<PolytopeBody> out;
    for (const Body& b : bodies()) {
      const auto* p = std::get_if<PolytopeBody>(&b);
      if (!p) fail(ErrorCode::InvalidSpec, opt_.command + " needs polytope bodies");
      out.push_back(*p);
    }
    return out;
  }

  std::vector<OrliczFunction> phis() const {
    if (cfg_.phis.empty()) fail(ErrorCode::InvalidSpec, "config has no phi");
    std::vector<OrliczFunction> out;
    for (const Json& spec : cfg_.phis) out.push_back(parse_phi(spec));
    return out;
  }

  void body() {
    const auto bs = bodies();
    if (csv()) sink_.line("index,kind,n,volume,vertices,facets");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      Json j = body_to_json(bs[i]);
      std::optional<SphereQuadrature> ball_nodes;
      if (std::holds_alternative<BallBody>(bs[i])) {
        ball_nodes = make_quadrature(dimension(bs[i]), settings(dimension(bs[i]), 1).ball.value_or(
                                                          default_ball_measure_spec(dimension(bs[i]), cfg_.seed)));
      }
      const auto diag = check_measure(surface_measure(bs[i], ball_nodes ? &*ball_nodes : nullptr), 1000, cfg_.seed);
      if (csv()) {
        const auto* p = std::get_if<PolytopeBody>(&bs[i]);
        sink_.line(std::to_string(i) + "," + j["kind"].get<std::string>() + "," + std::to_string(dimension(bs[i])) +
                   "," + csv_number(volume(bs[i])) + "," + std::to_string(p ? p->vertices().size() : 0) + "," +
                   std::to_string(p ? p->facets().size() : 0));
        continue;
      }
      sink_.record(Json{{"type", "body"},
                        {"index", i},
                        {"body", j},
                        {"measure",
                         {{"total_mass", diag.total_mass},
                          {"centroid_norm", diag.centroid_norm},
                          {"cone_volume", diag.cone_volume},
                          {"min_hemisphere_mass", diag.min_hemisphere_mass},
                          {"concentrated", diag.concentrated},
                          {"warnings", diag.warnings}}}});
    }
  }

  void phi_check() {
    const int samples = raw_value(cfg_, "samples", 1000);
    if (csv()) sink_.line("phi,phi_at_origin,min_symmetric_sum,worst_convexity_defect,min_coercivity_ratio,pass");
    for (const auto& phi : phis()) {
      const ClassCReport r = check_class_C(phi, samples, cfg_.seed);
      sink_.verdict(r.pass ? Verdict::Pass : Verdict::Fail);
      if (csv()) {
        sink_.line(phi.name() + "," + csv_number(r.phi_at_origin) + "," + csv_number(r.min_symmetric_sum) + "," +
                   csv_number(r.worst_convexity_defect) + "," + csv_number(r.min_coercivity_ratio) + "," +
                   (r.pass ? "true" : "false"));
        continue;
      }
      sink_.record(Json{{"type", "phi_check"},
                        {"phi", phi_to_json(phi)},
                        {"name", phi.name()},
                        {"strictly_convex", phi.strictly_convex()},
                        {"phi_at_origin", r.phi_at_origin},
                        {"min_symmetric_sum", r.min_symmetric_sum},
                        {"worst_convexity_defect", r.worst_convexity_defect},
                        {"min_coercivity_ratio", r.min_coercivity_ratio},
                        {"pass", r.pass}});
    }
  }

  void support() {
    const auto bs = bodies();
    if (csv()) sink_.line("body,phi,index,h,t,iterations,residual");
    for (std::size_t b = 0; b < bs.size(); ++b) {
      for (const auto& phi : phis()) {
        const HarnessSettings s = settings(dimension(bs[b]), phi.m());
        OracleSettings os;
        os.ball_measure = s.ball;
        const ProjectionBodyOracle oracle(bs[b], phi, os);
        const MatrixShape shape = oracle.shape();
        std::vector<Vec> xs;
        if (cfg_.raw.contains("points")) {
          for (const Json& p : cfg_.raw.at("points")) {
            xs.push_back(parse_vector(p));
            shape.require(xs.back());
          }
        } else {
          Rng rng(derive_seed(cfg_.seed, b));
          for (int i = 0; i < raw_value(cfg_, "samples", 10); ++i) xs.push_back(rng.unit_vector(shape.dim()));
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const SolveResult r = solve_support(oracle.evaluator(), xs[i]);
          if (csv()) {
            sink_.line(std::to_string(b) + "," + phi.name() + "," + std::to_string(i) + "," + csv_number(r.h) + "," +
                       csv_number(r.t) + "," + std::to_string(r.iterations) + "," + csv_number(r.residual));
            continue;
          }
          sink_.record(Json{{"type", "support"},
                            {"body", b},
                            {"phi", phi.name()},
                            {"x", vec_json(xs[i])},
                            {"h", r.h},
                            {"t", r.t},
                            {"iterations", r.iterations},
                            {"bracket_steps", r.bracket_steps},
                            {"residual", r.residual}});
        }
      }
    }
  }

  void gamma_cmd() {
    const auto bs = bodies();
    if (csv()) sink_.line("body,phi,n,m,gamma,gamma_error,polar_volume,body_volume,nodes,scheme");
    for (std::size_t b = 0; b < bs.size(); ++b) {
      for (const auto& phi : phis()) {
        const int n = dimension(bs[b]);
        const HarnessSettings s = settings(n, phi.m());
        GammaSettings gs;
        gs.oracle.ball_measure = s.ball;
        gs.threads = s.threads;
        const GammaReport r = gamma(bs[b], phi, make_quadrature(n * phi.m(), s.polar), gs);
        if (csv()) {
          sink_.line(std::to_string(b) + "," + phi.name() + "," + std::to_string(r.n) + "," + std::to_string(r.m) +
                     "," + csv_number(r.gamma) + "," + csv_number(r.gamma_error) + "," + csv_number(r.polar_volume) +
                     "," + csv_number(r.body_volume) + "," + std::to_string(r.nodes) + "," + to_string(r.scheme));
          continue;
        }
        sink_.record(Json{{"type", "gamma"},
                          {"body", b},
                          {"phi", phi.name()},
                          {"n", r.n},
                          {"m", r.m},
                          {"gamma", r.gamma},
                          {"polar_volume", r.polar_volume},
                          {"body_volume", r.body_volume},
                          {"quadrature_error", r.quadrature_error},
                          {"measure_error", r.measure_error},
                          {"gamma_error", r.gamma_error},
                          {"nodes", r.nodes},
                          {"scheme", to_string(r.scheme)},
                          {"solver", to_json(r.solver)}});
      }
    }
  }

  void petty() {
    const auto bs = bodies();
    for (const auto& phi : phis()) {
      VerdictRecord r = verify_petty(bs, phi, settings(dimension(bs.front()), phi.m()));
      r.experiment = cfg_.id;
      if (csv()) petty_table(r);
      sink_.verdict(r, csv());
    }
  }

  void petty_table(const VerdictRecord& r) {
    sink_.line("phi,trial,gamma,gamma_ball,margin,budget");
    const Json& q = r.quantities;
    for (std::size_t i = 0; i < q["gammas"].size(); ++i) {
      sink_.line(q["phi"].get<std::string>() + "," + std::to_string(i) + "," + csv_number(q["gammas"][i]) + "," +
                 csv_number(q["gamma_ball"]) + "," + csv_number(q["margins"][i]) + "," +
                 csv_number(r.errors["budgets"][i]));
    }
  }

  void affine() {
    const auto ps = polytopes();
    const int samples = raw_value(cfg_, "samples", 200);
    const int matrices = raw_value(cfg_, "matrices", 1);
    std::size_t index = 0;
    for (const auto& body : ps) {
      for (const auto& phi : phis()) {
        for (int k = 0; k < matrices; ++k, ++index) {
          Mat a;
          if (cfg_.raw.contains("A")) {
            a = parse_matrix(cfg_.raw.at("A"));
          } else {
            Rng rng(derive_seed(cfg_.seed, index));
            a = random_unimodular(body.dim(), rng);
          }
          HarnessSettings s = settings(body.dim(), phi.m());
          s.seed = derive_seed(cfg_.seed, 1000 + index);
          VerdictRecord r = verify_affine_invariance(body, phi, a, s, samples);
          r.experiment = cfg_.id;
          sink_.verdict(r, csv());
        }
      }
    }
  }

  void continuity() {
    const std::string family = raw_value(cfg_, "family", std::string("both"));
    if (family != "K" && family != "phi" && family != "both") {
      fail(ErrorCode::InvalidSpec, "family must be K, phi or both");
    }
    LadderOptions lo;
    lo.steps = raw_value(cfg_, "steps", lo.steps);
    lo.directions = raw_value(cfg_, "directions", lo.directions);
    lo.monotone_tail = raw_value(cfg_, "monotone_tail", lo.monotone_tail);
    lo.final_tol = raw_value(cfg_, "final_tol", lo.final_tol);
    for (const Body& body : bodies()) {
      for (const auto& phi : phis()) {
        const HarnessSettings s = settings(dimension(body), phi.m());
        if (family != "phi") {
          const auto* p = std::get_if<PolytopeBody>(&body);
          if (!p) fail(ErrorCode::InvalidSpec, "continuity in K needs a polytope base");
          VerdictRecord r = verify_continuity_in_K(*p, phi, s, lo);
          r.experiment = cfg_.id;
          if (csv()) ladder_table(r);
          sink_.verdict(r, csv());
        }
        if (family != "K") {
          VerdictRecord r = verify_continuity_in_phi(body, phi, s, lo);
          r.experiment = cfg_.id;
          if (csv()) ladder_table(r);
          sink_.verdict(r, csv());
        }
      }
    }
  }

  void ladder_table(const VerdictRecord& r) {
    sink_.line("family,eps,distance");
    const std::string fam = r.quantities.contains("constant_family_distance") ? "phi" : "K";
    for (const Json& p : r.quantities["curve"]) {
      sink_.line(fam + "," + csv_number(p["eps"]) + "," + csv_number(p["distance"]));
    }
  }

  void symmetrize() {
    const auto ps = polytopes();
    TrajectoryOptions to;
    to.iterations = raw_value(cfg_, "iterations", to.iterations);
    to.steiner.simplify = raw_value(cfg_, "simplify", false);
    to.steiner.max_vertices = raw_value(cfg_, "max_vertices", to.steiner.max_vertices);
    to.convergence_tol = raw_value(cfg_, "convergence_tol", to.convergence_tol);
    to.window_slack = raw_value(cfg_, "window_slack", to.window_slack);
    to.track_gamma = opt_.track == "gamma";
    Json dir_spec = cfg_.raw.contains("directions") ? cfg_.raw.at("directions") : Json{{"kind", "random"}};
    if (dir_spec.value("kind", "") == "random" && !dir_spec.contains("seed")) dir_spec["seed"] = cfg_.seed;
    const DirectionSequence dirs = parse_directions(dir_spec);
    const OrliczFunction phi = cfg_.phis.empty() ? OrliczFunction::abs_power(1.0) : phis().front();
    const PolytopeBody& body = ps.front();
    std::vector<TrajectoryRow> rows;
    VerdictRecord r = verify_trajectory(body, dirs, phi, settings(body.dim(), phi.m()), to, &rows);
    r.experiment = cfg_.id;
    if (to.track_gamma) {
      sink_.line("iteration,hausdorff_to_ball,gamma,error");
      for (const auto& row : rows) {
        sink_.line(std::to_string(row.iteration) + "," + csv_number(row.hausdorff_to_ball) + "," +
                   csv_number(row.gamma) + "," + csv_number(row.gamma_error));
      }
      sink_.verdict(r, true);
      return;
    }
    if (csv()) {
      sink_.line("iteration,hausdorff_to_ball,volume,step_volume_drift,vertices");
      for (const auto& row : rows) {
        sink_.line(std::to_string(row.iteration) + "," + csv_number(row.hausdorff_to_ball) + "," +
                   csv_number(row.volume) + "," + csv_number(row.step_volume_drift) + "," +
                   std::to_string(row.vertices));
      }
    } else {
      for (const auto& row : rows) {
        sink_.record(Json{{"type", "steiner_step"},
                          {"iteration", row.iteration},
                          {"hausdorff_to_ball", row.hausdorff_to_ball},
                          {"volume", row.volume},
                          {"step_volume_drift", row.step_volume_drift},
                          {"vertices", row.vertices}});
      }
    }
    sink_.verdict(r, csv());
  }

  void inclusion() {
    const auto ps = polytopes();
    const int bases = raw_value(cfg_, "bases", 50);
    const int rays = raw_value(cfg_, "rays", 50);
    std::size_t index = 0;
    for (const auto& body : ps) {
      for (const auto& phi : phis()) {
        Vec v;
        if (cfg_.raw.contains("v")) {
          v = parse_vector(cfg_.raw.at("v"));
          if (v.size() != body.dim()) fail(ErrorCode::ShapeMismatch, "v has the wrong dimension");
          v.normalize();
        } else {
          Rng rng(derive_seed(cfg_.seed, 2000 + index));
          v = rng.unit_vector(body.dim());
        }
        HarnessSettings s = settings(body.dim(), phi.m());
        s.seed = derive_seed(cfg_.seed, index++);
        VerdictRecord r = verify_inclusion(body, phi, v, bases, rays, s);
        r.experiment = cfg_.id;
        r.quantities["v"] = vec_json(v);
        sink_.verdict(r, csv());
      }
    }
  }

  void selfcheck() {
    OracleSuiteOptions so;
    so.directions = raw_value(cfg_, "directions", so.directions);
    HarnessSettings s = settings(cfg_.n, cfg_.m);
    VerdictRecord r = verify_oracle_equivalence(s, so);
    r.experiment = "selfcheck";
    if (csv()) {
      sink_.line("body,Q,p,worst_relative");
      for (const Json& c : r.quantities["cases"]) {
        sink_.line(c["body"].get<std::string>() + "," + c["Q"].get<std::string>() + "," + csv_number(c["p"]) + "," +
                   csv_number(c["worst_relative"]));
      }
    }
    sink_.verdict(r, csv());
  }

  const Options& opt_;
  ExperimentConfig cfg_;
  Sink sink_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orlicz projection bodies and Petty functionals", "orlicz_lab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "Experiment config (JSON)");
  app.add_option("--out", opt.out_path, "Write output here instead of stdout");
  app.add_option("--seed", opt.seed, "Override the config seed");
  app.add_option("--nodes", opt.nodes, "Override the polar quadrature node count")->check(CLI::Range(64, 100000000));
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", opt.threads, "Worker cap (default ORLICZ_LAB_THREADS or hardware)");
  app.add_flag("--no-timestamp", opt.no_timestamp, "Omit the timestamp from the provenance header");

  const std::vector<std::pair<const char*, const char*>> commands{
      {"body", "Describe bodies and their surface measures"},
      {"phi-check", "Sampled class-C checks of Phi"},
      {"support", "Support values of the projection body"},
      {"gamma", "Petty functional with error estimate"},
      {"verify-petty", "Gamma(K) <= Gamma(B) over trial bodies"},
      {"verify-affine", "SL(n) equivariance of supports and Gamma"},
      {"verify-continuity", "Continuity ladders in K and Phi"},
      {"symmetrize", "Iterated Steiner symmetrization"},
      {"check-inclusion", "Fiber symmetral inclusion samples"},
      {"selfcheck", "Root solver against the closed form"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) subs[name] = app.add_subcommand(name, help);
  subs["symmetrize"]->add_option("--track", opt.track, "Per-iteration quantity to track")->check(
      CLI::IsMember({"gamma"}));

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) opt.command = name;
  }

  try {
    std::ofstream file;
    std::ostream* target = &out;
    if (!opt.out_path.empty()) {
      file.open(opt.out_path);
      if (!file) fail(ErrorCode::Io, "cannot write '" + opt.out_path + "'");
      target = &file;
    }
    Runner runner(opt, *target);
    const int code = runner.run();
    target->flush();
    if (!*target) fail(ErrorCode::Io, "write failed");
    return code;
  } catch (const std::exception& e) {
    err << "orlicz_lab " << opt.command << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace orlicz::cli
