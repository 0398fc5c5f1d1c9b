#pragma once
// Multirobot navigation function: goal term, proximity functions, relation
// switches, obstacle product and the analytic gradient.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "coplan/dynamics.hpp"
#include "coplan/geometry.hpp"

namespace coplan {

struct NavParams {
  double kappa = 3.0;
  double lambda = 1.0;
  double h = 1.0;
};

struct NavAgent {
  const AgentModel* model = nullptr;
  Eigen::VectorXd goal;
  std::vector<int> forbidden;  // region indices
};

struct NavTeam {
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();  // object position
  double radius = 2.75;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();  // sphere center minus object position
  std::vector<int> forbidden;
};

struct NavScenario {
  std::vector<NavAgent> agents;
  std::vector<NavTeam> teams;
  std::vector<BoundingSphere> statics;
  std::vector<Region> regions;
  double r0 = 30.0;
  NavParams params;

  int dim() const;  // 4 per agent (model dof), 3 per team
};

/// Stacked coordinates: agent joint vectors first, then team object positions.
struct NavState {
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::Vector3d> p;
};

Eigen::VectorXd stack(const NavScenario& sc, const NavState& x);
NavState unstack(const NavScenario& sc, const Eigen::VectorXd& z);

struct Beta {
  std::string id;
  bool workspace = false;
  double value = 0.0;
  Eigen::VectorXd grad;
};

double goal_gamma(const NavScenario& sc, const NavState& x);
std::vector<Beta> beta_catalog(const NavScenario& sc, const NavState& x, bool with_gradient = false);

/// b + lambda * b / (b + B^(1/h)), zero when b = B = 0.
double rvf(double b, double B, double lambda, double h);

double obstacle_G(const NavScenario& sc, const NavState& x);
double navfn_value(const NavScenario& sc, const NavState& x);

struct NavEvaluation {
  double value = 0.0;
  double gamma = 0.0;
  double log_G = 0.0;  // -inf on the collision set
  double min_beta = 0.0;
  Eigen::VectorXd gradient;                     // stacked
  std::vector<Eigen::VectorXd> agent_gradient;  // per free agent
  std::vector<Eigen::Vector3d> team_gradient;   // per team, position block
};

/// Throws std::domain_error when G = 0.
NavEvaluation navfn_gradient(const NavScenario& sc, const NavState& x);

}  // namespace coplan
