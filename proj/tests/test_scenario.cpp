#include <doctest.h>

#include <filesystem>
#include <string>

#include "topo/manifest.hpp"
#include "topo/scenario.hpp"

using namespace topo;
using nlohmann::json;

namespace {

std::string scenario_path(const std::string& name) { return std::string(TOPO_SCENARIO_DIR) + "/" + name + ".json"; }

json small_2d() {
  return json::parse(R"j({
    "name": "small2d", "config": "D2_02",
    "grid": {"counts": [16, 16], "lower": [0, 0], "upper": ["2*pi", "2*pi"], "boundary": ["periodic", "periodic"]},
    "frame": [["1", "0"], ["0", "1"]],
    "gauge_potential": ["0.2*sin(y)", "0.1*cos(x)"],
    "polar": {"phi": "1", "angle": "0.2*sin(x)", "L": [{"generator": "rot", "param": "0.3*cos(y)"}]},
    "params": {"m": 1, "q": 1},
    "checks": ["maxwell", "div_K2", "polar_roundtrip"]
  })j");
}

std::string error_of(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

const CheckRecord& record(const VerificationReport& r, const std::string& name) {
  for (const auto& rec : r.records)
    if (rec.check == name) return rec;
  FAIL("no record " << name);
  return r.records.front();
}

}  // namespace

TEST_CASE("built-in plane wave loads") {
  const ScenarioSpec s = load_scenario(scenario_path("flat4d_planewave"));
  CHECK(s.name == "flat4d_planewave");
  CHECK(s.config.id == Config::D4_13);
  CHECK(s.m == 1.0);
  CHECK(s.q == 1.0);
  CHECK(s.coordinates == std::vector<std::string>{"t", "x", "y", "z"});
}

TEST_CASE("every shipped scenario loads") {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(TOPO_SCENARIO_DIR)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_scenario(e.path().string()));
    ++n;
  }
  CHECK(n >= 7);
}

TEST_CASE("schema errors name the field") {
  json d4 = json::parse(R"j({
    "name": "bad", "config": "D4_13",
    "grid": {"counts": [4, 4, 4, 4], "lower": [0, 0, 0, 0], "upper": [1, 1, 1, 1],
             "boundary": ["periodic", "periodic", "periodic", "periodic"]},
    "frame": [["1", "0", "0", "0"], ["0", "1", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
    "checks": ["algebra"]
  })j");
  const std::string msg = error_of(d4);
  CHECK(msg.find("frame") != std::string::npos);
  CHECK(msg.find("dimension mismatch") != std::string::npos);

  json d = small_2d();
  d["params"]["q"] = 0;
  d["polar"]["L"].push_back({{"generator", "phase"}, {"param", "0.1*x"}});
  CHECK(error_of(d).find("q") != std::string::npos);

  d = small_2d();
  d["config"] = "D7_00";
  CHECK_THROWS_AS(parse_scenario(d), Error);

  d = small_2d();
  d["frame"][0][0] = "1 + ";
  CHECK(error_of(d).find("offset 4") != std::string::npos);

  d = small_2d();
  d["polar"]["L"][0]["generator"] = "boost_x";
  CHECK_THROWS_AS(parse_scenario(d), Error);

  d = small_2d();
  d.erase("grid");
  CHECK(error_of(d).find("grid") != std::string::npos);

  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), Error);
}

TEST_CASE("zero charge is fine without a phase") {
  json d = small_2d();
  d["params"]["q"] = 0;
  d.erase("gauge_potential");
  CHECK_NOTHROW(parse_scenario(d));
}

TEST_CASE("unknown and inapplicable checks fail alone") {
  json d = small_2d();
  d["checks"] = {"maxwell", "no_such_check", "bianchi"};
  const VerificationReport r = run_suite(parse_scenario(d));
  CHECK(record(r, "maxwell").passed);
  CHECK(record(r, "no_such_check").error.has_value());
  CHECK(record(r, "bianchi").error.has_value());
  CHECK_FALSE(r.passed());
}

TEST_CASE("check catalogue") {
  const auto names = check_names();
  CHECK(names.size() >= 25);
  CHECK(check_applies("bianchi", Config::D4_13));
  CHECK_FALSE(check_applies("bianchi", Config::D2_02));
  CHECK(check_applies("constraint", Config::D3_EUC));
  CHECK_FALSE(check_applies("decoupling", Config::D3_EUC));
}

TEST_CASE("plane wave solves the field equations") {
  ScenarioSpec s = load_scenario(scenario_path("flat4d_planewave"));
  s.checks = {"dirac", "polar_A", "polar_B", "equivalence"};
  s.diagnostics.clear();
  const VerificationReport r = run_suite(s);
  for (const auto& rec : r.records) {
    CAPTURE(rec.check);
    CHECK(rec.passed);
    CHECK(rec.levels.back().linf <= 1e-10);
  }
}

TEST_CASE("sphere patch Ricci scalar converges at second order") {
  ScenarioSpec s = load_scenario(scenario_path("sphere2d_patch"));
  s.checks = {"ricci_scalar"};
  s.diagnostics.clear();
  RunOptions o;
  o.grid = 32;
  const VerificationReport r = run_suite(s, o);
  const CheckRecord& rec = record(r, "ricci_scalar");
  REQUIRE(rec.observed_order);
  CHECK(*rec.observed_order == doctest::Approx(2.0).epsilon(0.1));
  CHECK(rec.levels.size() == 2);
}

TEST_CASE("refinement options") {
  json d = small_2d();
  d["checks"] = {"decomposition"};
  RunOptions o;
  o.refinements = 0;
  const VerificationReport r0 = run_suite(parse_scenario(d), o);
  CHECK(r0.records[0].error.has_value());
  o.refinements = 2;
  const VerificationReport r2 = run_suite(parse_scenario(d), o);
  CHECK(r2.records[0].levels.size() == 3);
  CHECK(r2.records[0].levels[2].grid == std::vector<std::size_t>{64, 64});
}

TEST_CASE("reports are deterministic and embed the conventions hash") {
  const ScenarioSpec s = parse_scenario(small_2d());
  RunOptions one, four;
  four.exec.workers = 4;
  const json a = report_to_json(run_suite(s, one));
  const json b = report_to_json(run_suite(s, one));
  const json c = report_to_json(run_suite(s, four));
  CHECK(a.dump() == b.dump());
  CHECK(a["conventions_hash"] == manifest_hash());
  REQUIRE(a["records"].size() == c["records"].size());
  for (std::size_t i = 0; i < a["records"].size(); ++i) {
    CHECK(a["records"][i]["status"] == c["records"][i]["status"]);
    CHECK(a["records"][i]["Linf"].get<double>() == doctest::Approx(c["records"][i]["Linf"].get<double>()).epsilon(1e-13));
  }
  CHECK_FALSE(a["records"][0].contains("runtime"));
}

TEST_CASE("scenario hash follows the overrides") {
  const ScenarioSpec s = parse_scenario(small_2d());
  RunOptions o;
  const std::string h = scenario_hash(s, o);
  CHECK(h.size() == 64);
  CHECK(scenario_hash(s, o) == h);
  o.grid = 20;
  CHECK(scenario_hash(s, o) != h);
  o.grid.reset();
  o.exec.workers = 4;
  CHECK(scenario_hash(s, o) == h);
}

TEST_CASE("field export") {
  const auto dir = std::filesystem::temp_directory_path() / "topo_fields_test";
  std::filesystem::remove_all(dir);
  RunOptions o;
  o.fields_dir = dir.string();
  run_suite(parse_scenario(small_2d()), o);
  CHECK(std::filesystem::exists(dir / "small2d.maxwell.csv"));
  CHECK(std::filesystem::exists(dir / "small2d.maxwell.bin"));
  std::filesystem::remove_all(dir);
}
