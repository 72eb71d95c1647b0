#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "magsurf/experiments.hpp"

using namespace magsurf;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kTrace = R"({
  "schema_version": "1",
  "chart": {"kind": "euclidean"},
  "field": {"constant": 1.0},
  "integrator": {"step_scale": 0.005},
  "experiment": {"type": "trace", "start": [0.0, 0.0], "velocity": [1.0, 0.0],
                 "duration": 6.283185307179586}
})";

}  // namespace

TEST_CASE("a valid config parses with defaults") {
  RunConfig cfg = parse_config(kTrace);
  CHECK(cfg.experiment == ExperimentType::trace);
  CHECK(cfg.sys.chart.kind() == ChartKind::euclidean);
  CHECK(cfg.sys.b({0, 0}) == 1.0);
  CHECK(cfg.ctrl.step_scale == 0.005);
  CHECK(cfg.grid_boundary == 16);
  CHECK(cfg.seed == 1);
  CHECK_FALSE(cfg.domain.has_value());
  CHECK(config_hash_hex(cfg).size() == 16);
}

TEST_CASE("unknown keys are rejected by name") {
  std::string bad = kTrace;
  bad.insert(bad.find("\"chart\""), "\"tolerance\": 3, ");
  try {
    parse_config(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.violations().size() == 1);
    CHECK(e.violations()[0].find("tolerance") != std::string::npos);
  }
}

TEST_CASE("all violations are reported at once") {
  const char* broken = R"({
    "schema_version": "2",
    "chart": {"kind": "nowhere"},
    "field": {"constant": 1.0},
    "domain": {"circle": {"center": [0, 0], "radius": -2.0}},
    "experiment": {"type": "scatter"}
  })";
  try {
    parse_config(broken);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() >= 3);
    std::string all;
    for (const auto& s : e.violations()) all += s + "\n";
    CHECK(all.find("schema_version") != std::string::npos);
    CHECK(all.find("nowhere") != std::string::npos);
    CHECK(all.find("domain.circle.radius") != std::string::npos);
  }
}

TEST_CASE("experiments that need a domain demand one") {
  const char* nodomain = R"({
    "schema_version": "1",
    "chart": {"kind": "euclidean"},
    "field": {"constant": 1.0},
    "experiment": {"type": "simplicity"}
  })";
  CHECK_THROWS_AS(parse_config(nodomain), ConfigError);
}

TEST_CASE("experiment names round trip") {
  for (const char* n : {"trace", "exit", "scatter", "jacobi", "conjugates",
                        "index", "convexity", "simplicity", "closure",
                        "compare-scatter"}) {
    auto e = experiment_from_name(n);
    REQUIRE(e.has_value());
    CHECK(to_string(*e) == n);
  }
  CHECK_FALSE(experiment_from_name("plot").has_value());
}

TEST_CASE("simplicity run reports simple on the small flat disk") {
  RunConfig cfg = load_config(std::string(TEST_DATA_DIR) + "/simplicity_flat.json");
  RunResult res = run_experiment(cfg, std::string(TEST_OUT_DIR) + "/simp", 4);
  CHECK(res.summary.find("simple") == 0);
  CHECK(std::filesystem::exists(res.csv_path));
  CHECK(slurp(res.sidecar_path).find(config_hash_hex(cfg)) != std::string::npos);
}

TEST_CASE("compare-scatter of a system against itself is zero") {
  RunConfig cfg = load_config(std::string(TEST_DATA_DIR) + "/compare_self.json");
  RunResult res = run_experiment(cfg, std::string(TEST_OUT_DIR) + "/cmp", 4);
  const std::string csv = slurp(res.csv_path);
  CHECK(csv.find("\n0,0,0,0\n") != std::string::npos);
}

TEST_CASE("reruns produce byte-identical artifacts") {
  RunConfig cfg = parse_config(kTrace);
  RunResult a = run_experiment(cfg, std::string(TEST_OUT_DIR) + "/det_a");
  RunResult b = run_experiment(cfg, std::string(TEST_OUT_DIR) + "/det_b");
  CHECK(slurp(a.csv_path) == slurp(b.csv_path));
  CHECK(slurp(a.sidecar_path) == slurp(b.sidecar_path));
}

TEST_CASE("thread count does not change grid artifacts") {
  RunConfig cfg = load_config(std::string(TEST_DATA_DIR) + "/compare_self.json");
  RunResult a = run_experiment(cfg, std::string(TEST_OUT_DIR) + "/thr_a", 1);
  RunResult b = run_experiment(cfg, std::string(TEST_OUT_DIR) + "/thr_b", 4);
  CHECK(slurp(a.csv_path) == slurp(b.csv_path));
}

TEST_CASE("the command line front end") {
  const std::string cli = MAGSURF_CLI_PATH;
  const std::string data = TEST_DATA_DIR;
  const std::string out = std::string(TEST_OUT_DIR) + "/cli";

  int ok = std::system((cli + " simplicity --config " + data +
                        "/simplicity_flat.json --out " + out + " > /dev/null")
                           .c_str());
  CHECK(ok == 0);
  CHECK(std::filesystem::exists(out + "/simplicity.csv"));

  int bad = std::system((cli + " trace --config " + data +
                         "/bad_radius.json --out " + out +
                         "_bad 2> /dev/null")
                            .c_str());
  CHECK(bad != 0);
  CHECK(std::filesystem::exists(out + "_bad/error.json"));

  int mismatch = std::system((cli + " scatter --config " + data +
                              "/simplicity_flat.json --out " + out +
                              "_mm 2> /dev/null")
                                 .c_str());
  CHECK(mismatch != 0);
}
