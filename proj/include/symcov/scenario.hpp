#pragma once

#include <nlohmann/json_fwd.hpp>

#include "symcov/expr.hpp"
#include "symcov/states.hpp"

namespace symcov {

using json = nlohmann::json;

struct Tolerances {
  double geometry = tol::geometry;
  double quadrature = tol::quadrature;
  double fd = tol::fd;
};

/// A fully resolved scenario: manifold, deck group, cocycle, forms, action,
/// and the checks to run.
struct Scenario {
  std::string name;
  Atlas atlas;
  DeckGroup deck;
  CechCocycle1 cocycle;
  Covering covering;
  std::map<std::string, OneForm> forms;
  std::optional<TwoForm> omega;
  std::optional<GroupAction> action;
  std::vector<std::optional<ComponentLift>> component_lifts;
  std::vector<std::string> checks;
  Tolerances tol;
  int window = 3;
  double grid = 0.2;
  uint64_t seed = 0;
  int path_samples = 256;

  LiftedAction make_lift() const;
  LocalMomentMap make_moment(MomentBuildReport* rep = nullptr) const;
  std::vector<CoverPoint> sample_cover_points(int n, int label_window = 1) const;
};

/// Parses a scenario config document (schema 1). Throws std::invalid_argument
/// with a descriptive message on schema violations.
Scenario load_scenario(const json& config);
Scenario load_scenario_file(const std::string& path);

/// Runs the scenario's check list; the report is deterministic for a fixed
/// seed (excluding the timestamp field). Each check entry carries
/// {name, pass, ...residuals}; overall pass is the conjunction.
json run_scenario(const Scenario& s);

/// One scenario check by name (the same functions back `run_scenario`):
/// cocycle | transitions | action | periods | potential | homotopy |
/// obstruction | lift_law | extension | cotangent | moment | equivariance |
/// transform | intermediate | states | flow | cohomology.
json run_check(const Scenario& s, const std::string& check);

/// Built-in scenario catalog (the JSON files under scenarios/ mirror these):
/// circle_universal, circle_z4_table, annulus_forms, torus_forms,
/// cylinder_rotation, cylinder_boost, cylinder_screw, plane_translations,
/// circle_halfturn_extension, circle_reflection_extension,
/// circle_rotation_obstruction.
Scenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

}  // namespace symcov
