#pragma once
// Feedback laws for navigating agents and transport teams.

#include <Eigen/Dense>
#include <vector>

#include "coplan/dynamics.hpp"

namespace coplan {

struct ControlGains {
  Eigen::VectorXd K;               // diagonal damping, one entry per joint
  std::vector<double> load_share;  // c_tau per team member

  /// Throws std::invalid_argument on a non-positive gain or shares not summing to 1.
  void validate() const;
};

/// u = g(q) - grad - K qd
Eigen::VectorXd transition_control(const AgentModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                   const Eigen::VectorXd& grad, const Eigen::VectorXd& K);

/// Member wrench J_O^{-T} c (g_O - J_s^T grad - v) + g_member.
/// grad is the gradient with respect to the object pose (position, Euler angles).
Vector6d transport_control(const TeamMember& member, const CoupledState& team, const ObjectModel& object,
                           const Vector6d& grad, double c);

/// Wrenches for every member of the team, shares from `c`.
Eigen::VectorXd team_control(const CoupledState& team, const ObjectModel& object, const Vector6d& grad,
                             const std::vector<double>& c);

/// phi + kinetic energy of free agents and transported objects.
double lyapunov(double phi, const std::vector<const AgentModel*>& agents, const std::vector<Eigen::VectorXd>& q,
                const std::vector<Eigen::VectorXd>& qd, const std::vector<Matrix6d>& team_inertia,
                const std::vector<Vector6d>& team_v);

}  // namespace coplan
