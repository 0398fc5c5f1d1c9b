#pragma once
// Scenario files: world, agents, objects, formulas and run parameters.

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "coplan/dynamics.hpp"
#include "coplan/geometry.hpp"
#include "coplan/navfn.hpp"
#include "coplan/planner.hpp"

namespace coplan {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AgentSpec {
  std::string name;
  ExampleAgentParams params;
  Eigen::VectorXd q0;
  std::string formula;  // may be empty
};

struct ObjectSpec {
  std::string name;
  double mass = 0.5;
  double radius = 0.5;
  Vector6d pose = Vector6d::Zero();
  int threshold = 1;
  std::string formula;
};

struct SimConfig {
  double dt = 1e-3;
  double sample_period = 0.1;
  double nav_horizon = 3600.0;
  double transport_horizon = 1200.0;
  double region_slack = 1e-3;
  double speed_tol = 1e-3;
  int suffix_reps = 2;
  std::uint64_t seed = 1;
};

struct Scenario {
  std::string name;
  double r0 = 30.0;
  std::vector<Region> regions;
  std::vector<AgentSpec> agents;
  std::vector<ObjectSpec> objects;
  NavParams nav;
  double kappa_transport = 3.0;
  Eigen::VectorXd K;  // per joint, shared by all agents
  double team_radius = 2.75;
  int max_movers = -1;
  std::string cost_model = "squared_displacement";
  SimConfig sim;

  std::vector<std::shared_ptr<const AgentModel>> models() const;
  std::vector<ObjectModel> object_models() const;
  /// Conjunction of the per-entity formulas.
  std::string global_formula() const;
  /// Regions containing each body; throws ScenarioError when a body fits nowhere.
  DiscreteProblem discrete() const;
};

/// Parses and validates; throws ScenarioError with a diagnostic.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string dump_scenario(const Scenario& sc);

}  // namespace coplan
