#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "orlicz/cli.hpp"
#include "orlicz/config.hpp"

using namespace orlicz;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "orlicz_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(ORLICZ_CONFIG_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

std::vector<Json> json_lines(const std::string& text) {
  std::vector<Json> out;
  std::istringstream s(text);
  for (std::string line; std::getline(s, line);) {
    if (!line.empty() && line[0] == '{') out.push_back(Json::parse(line));
  }
  return out;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("body and Phi specs round trip") {
  const Json tri = Json::parse(R"({"kind":"polytope","n":2,"vertices":[[-1,-1],[2,-1],[-1,1]]})");
  const Body b = parse_body(tri);
  CHECK(volume(b) == doctest::Approx(3.0));
  CHECK(volume(parse_body(body_to_json(b))) == doctest::Approx(3.0));
  CHECK(volume(parse_body(Json::parse(R"({"kind":"ball","n":3,"radius":2})"))) ==
        doctest::Approx(32.0 * std::numbers::pi / 3.0));
  const OrliczFunction phi = parse_phi(Json::parse(
      R"({"kind":"composite","phi":{"kind":"power","p":1},"Q":{"vertices":[[0,0],[-1,0],[0,-1]]}})"));
  Vec z(2);
  z << -2, 1;
  CHECK(phi(z) == doctest::Approx(2.0));
  CHECK(parse_phi(phi_to_json(phi))(z) == doctest::Approx(2.0));
  CHECK(parse_phi(Json::parse(R"({"kind":"squared_norm","m":2})")).m() == 2);
}

TEST_CASE("malformed specs are rejected") {
  CHECK(code_of([] { parse_body(Json::parse(R"({"kind":"blob","n":2})")); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { parse_phi(Json::parse(R"({"kind":"abs_power","p":0.5})")); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { parse_quadrature(Json::parse(R"({"scheme":"simpson"})"), 2); }) == ErrorCode::InvalidScheme);
  CHECK(code_of([] { parse_config(Json::parse(R"({"n":0,"m":1})")); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { load_config("/nonexistent/config.json"); }) == ErrorCode::Io);
}

TEST_CASE("experiment configs in the repository parse") {
  for (const auto& entry : std::filesystem::directory_iterator(ORLICZ_CONFIG_DIR)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
  }
}

TEST_CASE("gamma of the square from the command line") {
  const Run r = run({"gamma", "--config", config("square_abs.json"), "--no-timestamp"});
  CHECK(r.code == 0);
  const auto lines = json_lines(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines.front()["type"] == "provenance");
  bool found = false;
  for (const auto& j : lines) {
    if (j.contains("gamma")) {
      CHECK(j["gamma"].get<double>() == doctest::Approx(2.0).epsilon(5e-3));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("command line output is reproducible") {
  const std::vector<std::string> args{"verify-petty", "--config", config("petty_2d.json"), "--no-timestamp",
                                      "--nodes",      "2048"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto threads = args;
  threads.insert(threads.end(), {"--threads", "1"});
  CHECK(run(threads).out == a.out);
}

TEST_CASE("exit codes") {
  CHECK(run({"gamma"}).code == 1);
  CHECK(run({"gamma", "--config", "/nonexistent.json"}).code == 1);
  CHECK(run({"gamma", "--config", config("square_abs.json"), "--bogus"}).code == 1);
  CHECK(run({"--version"}).code == 0);
  CHECK(run({"--version"}).out.find(cli::kVersion) != std::string::npos);
  const std::string bad = write_temp("orlicz_bad.json", R"({"id":"x","n":2,"m":1,"body":{"kind":"blob"}})");
  const Run r = run({"gamma", "--config", bad});
  CHECK(r.code == 1);
  CHECK(r.err.find("orlicz_lab gamma") != std::string::npos);
}

TEST_CASE("selfcheck runs without a config") {
  const Run r = run({"selfcheck", "--no-timestamp"});
  CHECK(r.code == 0);
  const auto lines = json_lines(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1]["experiment"] == "selfcheck");
  CHECK(lines[1]["verdict"] == "pass");
}

TEST_CASE("csv output and gamma tracking") {
  const std::string cfg = write_temp("orlicz_steiner.json", R"({"id":"s","n":2,"m":1,
    "body":{"kind":"polytope","n":2,"vertices":[[-1,-1],[2,-1],[-1,1]]},
    "iterations":5,"convergence_tol":1.0,"simplify":true,"max_vertices":64,
    "quadrature":{"scheme":"grid","N":1024},
    "directions":{"kind":"random","seed":3}})");
  const Run r = run({"symmetrize", "--config", cfg, "--track", "gamma", "--format", "csv", "--no-timestamp"});
  CHECK(r.code == 0);
  std::istringstream s(r.out);
  std::vector<std::string> data;
  for (std::string line; std::getline(s, line);) {
    if (!line.empty() && line[0] != '#') data.push_back(line);
  }
  REQUIRE(data.size() == 7);
  CHECK(data[0] == "iteration,hausdorff_to_ball,gamma,error");
  CHECK(data[1].rfind("0,", 0) == 0);
}

TEST_CASE("support and body commands") {
  const Run body = run({"body", "--config", config("square_abs.json"), "--no-timestamp"});
  CHECK(body.code == 0);
  const Run support = run({"support", "--config", config("square_abs.json"), "--no-timestamp"});
  CHECK(support.code == 0);
  const Run out_file = run({"body", "--config", config("square_abs.json"), "--no-timestamp", "--out",
                            (std::filesystem::temp_directory_path() / "orlicz_body.jsonl").string()});
  CHECK(out_file.code == 0);
  std::ifstream f(std::filesystem::temp_directory_path() / "orlicz_body.jsonl");
  std::stringstream content;
  content << f.rdbuf();
  CHECK(content.str() == body.out);
}
