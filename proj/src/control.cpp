#include "coplan/control.hpp"

#include <cmath>
#include <stdexcept>

namespace coplan {

void ControlGains::validate() const {
  for (int i = 0; i < K.size(); ++i)
    if (!(K(i) > 0.0)) throw std::invalid_argument("damping gains must be positive");
  if (load_share.empty()) return;
  double s = 0.0;
  for (double c : load_share) {
    if (!(c > 0.0)) throw std::invalid_argument("load shares must be positive");
    s += c;
  }
  if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("load shares must sum to 1");
}

Eigen::VectorXd transition_control(const AgentModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                   const Eigen::VectorXd& grad, const Eigen::VectorXd& K) {
  return model.gravity(q) - grad - K.cwiseProduct(qd);
}

Vector6d transport_control(const TeamMember& member, const CoupledState& team, const ObjectModel& object,
                           const Vector6d& grad, double c) {
  Matrix6d Js = euler_rate_jacobian(team.pose);
  Vector6d w = c * (object.gravity() - Js.transpose() * grad - team.v);
  Matrix6d JO = agent_object_jacobian(member.attachment, *member.model, member.q);
  return JO.transpose().partialPivLu().solve(w) + member.model->member_gravity(member.q);
}

Eigen::VectorXd team_control(const CoupledState& team, const ObjectModel& object, const Vector6d& grad,
                             const std::vector<double>& c) {
  if (c.size() != team.members.size()) throw std::invalid_argument("one load share per member");
  Eigen::VectorXd u(6 * team.members.size());
  for (std::size_t k = 0; k < team.members.size(); ++k)
    u.segment<6>(6 * k) = transport_control(team.members[k], team, object, grad, c[k]);
  return u;
}

double lyapunov(double phi, const std::vector<const AgentModel*>& agents, const std::vector<Eigen::VectorXd>& q,
                const std::vector<Eigen::VectorXd>& qd, const std::vector<Matrix6d>& team_inertia,
                const std::vector<Vector6d>& team_v) {
  double V = phi;
  for (std::size_t i = 0; i < agents.size(); ++i) V += 0.5 * qd[i].dot(agents[i]->inertia(q[i]) * qd[i]);
  for (std::size_t t = 0; t < team_inertia.size(); ++t) V += 0.5 * team_v[t].dot(team_inertia[t] * team_v[t]);
  return V;
}

}  // namespace coplan
