#include <doctest.h>

#include <nlohmann/json.hpp>

#include "symcov/scenario.hpp"

using namespace symcov;

TEST_CASE("scenario configs load and resolve") {
  json cfg = {
      {"schema", 1},
      {"name", "demo"},
      {"manifold", {{"type", "circle"}, {"charts", 3}, {"pad", 0.25}}},
      {"group", {{"kind", "Z"}, {"rank", 1}}},
      {"cocycle", {{"edges", {{{"a", 2}, {"b", 0}, {"g", 1}}}}}},
      {"forms", {{{"name", "dtheta"}, {"coeffs", {"1"}}}}},
      {"checks", {"cocycle", "periods"}},
      {"seed", 7},
  };
  const Scenario s = load_scenario(cfg);
  CHECK(s.name == "demo");
  CHECK(s.atlas.charts.size() == 3);
  CHECK(s.forms.count("dtheta") == 1);
  CHECK(s.seed == 7);
  CHECK(s.covering.simply_connected_cover());

  json rep = run_scenario(s);
  CHECK(rep["pass"].get<bool>());
}

TEST_CASE("schema violations are config errors") {
  CHECK_THROWS_AS(load_scenario(json{{"schema", 2}}), std::invalid_argument);
  CHECK_THROWS_AS(load_scenario(json::array()), std::invalid_argument);
  json cfg = {{"schema", 1}, {"manifold", {{"type", "klein_bottle"}}}};
  CHECK_THROWS_AS(load_scenario(cfg), std::invalid_argument);
}

TEST_CASE("unknown checks are rejected") {
  const Scenario s = builtin_scenario("circle_universal");
  CHECK_THROWS_AS(run_check(s, "zeta"), std::invalid_argument);
}

TEST_CASE("empty check lists pass vacuously") {
  Scenario s = builtin_scenario("circle_universal");
  s.checks.clear();
  const json rep = run_scenario(s);
  CHECK(rep["pass"].get<bool>());
  CHECK(rep["checks"].empty());
}

TEST_CASE("reports are reproducible for a fixed seed") {
  Scenario s = builtin_scenario("circle_universal");
  s.checks = {"cocycle", "transitions", "periods"};
  const std::string a = run_scenario(s).dump();
  const std::string b = run_scenario(s).dump();
  CHECK(a == b);
}

TEST_CASE("builtin scenarios resolve") {
  for (const auto& name : builtin_scenario_names()) CHECK_NOTHROW(builtin_scenario(name));
  CHECK_THROWS_AS(builtin_scenario("nope"), std::invalid_argument);
}

TEST_CASE("obstruction check distinguishes the S1 and R parametrizations") {
  const Scenario s = builtin_scenario("circle_rotation_obstruction");
  const json r = run_check(s, "obstruction");
  CHECK(r["obstructed"].get<bool>());
  CHECK(r["cover_group_law_labels_exact"].get<bool>());
  CHECK(r["pass"].get<bool>());
}

TEST_CASE("the torsion scenario reports vanishing periods") {
  const Scenario s = builtin_scenario("circle_z4_table");
  const json r = run_check(s, "periods");
  CHECK(r["pass"].get<bool>());
  CHECK(r["forms"][0]["homomorphism_residual"].get<double>() == 0.0);
}
