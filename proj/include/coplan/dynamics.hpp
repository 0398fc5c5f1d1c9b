#pragma once
// Rigid-body models for agents, objects and grasped teams.

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <vector>

namespace coplan {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix6Xd = Eigen::Matrix<double, 6, Eigen::Dynamic>;
using Matrix3Xd = Eigen::Matrix<double, 3, Eigen::Dynamic>;

constexpr double kGravity = 9.81;

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class S>
Eigen::Matrix<S, 3, 3> skew(const Eigen::Matrix<S, 3, 1>& v) {
  Eigen::Matrix<S, 3, 3> m;
  m << S(0), -v(2), v(1), v(2), S(0), -v(0), -v(1), v(0), S(0);
  return m;
}

/// Extrinsic x-y-z Euler angles (roll, pitch, yaw): R = Rz(yaw) Ry(pitch) Rx(roll).
template <class S>
Eigen::Matrix<S, 3, 3> euler_to_rotation(const Eigen::Matrix<S, 3, 1>& eta) {
  using std::cos;
  using std::sin;
  S cr = cos(eta(0)), sr = sin(eta(0)), cp = cos(eta(1)), sp = sin(eta(1)), cy = cos(eta(2)), sy = sin(eta(2));
  Eigen::Matrix<S, 3, 3> R;
  R << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp, cp * sr, cp * cr;
  return R;
}

/// omega = E(eta) * d(eta)/dt for the angles above.
template <class S>
Eigen::Matrix<S, 3, 3> euler_rate_matrix(const Eigen::Matrix<S, 3, 1>& eta) {
  using std::cos;
  using std::sin;
  S cp = cos(eta(1)), sp = sin(eta(1)), cy = cos(eta(2)), sy = sin(eta(2));
  Eigen::Matrix<S, 3, 3> E;
  E << cp * cy, -sy, S(0),
       cp * sy, cy, S(0),
       -sp, S(0), S(1);
  return E;
}

/// Maps (linear velocity, angular velocity) to (position rate, Euler rates).
/// Throws SingularityError when |pitch| >= pi/2 - margin.
Matrix6d euler_rate_jacobian(const Vector6d& pose, double margin = 1e-6);

double wrap_angle(double a);

struct GraspAttachment {
  int agent = 0;
  int object = 0;
  Eigen::Vector3d p_offset = Eigen::Vector3d::Zero();    // end-effector frame
  Eigen::Vector3d eta_offset = Eigen::Vector3d::Zero();
  Eigen::VectorXd q_grasp;                               // posture held during transport
};

class AgentModel {
 public:
  virtual ~AgentModel() = default;

  virtual int dof() const = 0;
  virtual Eigen::MatrixXd inertia(const Eigen::VectorXd& q) const = 0;
  virtual Eigen::MatrixXd coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const = 0;
  virtual Eigen::VectorXd gravity(const Eigen::VectorXd& q) const = 0;

  virtual Eigen::Vector3d ee_position(const Eigen::VectorXd& q) const = 0;
  virtual Eigen::Vector3d ee_euler(const Eigen::VectorXd& q) const = 0;
  virtual Eigen::Matrix3d ee_rotation(const Eigen::VectorXd& q) const = 0;
  virtual Matrix6Xd jacobian(const Eigen::VectorXd& q) const = 0;
  /// Rows x, y, yaw of the geometric Jacobian.
  virtual Matrix3Xd planar_jacobian(const Eigen::VectorXd& q) const = 0;

  virtual Eigen::Vector3d bounding_center(const Eigen::VectorXd& q) const = 0;
  virtual Matrix3Xd bounding_center_jacobian(const Eigen::VectorXd& q) const = 0;
  virtual double bounding_radius() const = 0;
  virtual int capability() const = 0;

  /// det(Jp Jp^T) > tol
  bool in_valid_set(const Eigen::VectorXd& q, double tol = 1e-9) const;

  // Frozen-posture rigid body seen from the end effector, used as the
  // member's task-space model inside a transport team.
  virtual Matrix6d member_inertia(const Eigen::VectorXd& q) const = 0;
  virtual Matrix6d member_coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const = 0;
  virtual Vector6d member_gravity(const Eigen::VectorXd& q) const = 0;

  /// Configuration whose bounding center sits at c with the arm at rest.
  virtual Eigen::VectorXd configuration_for_center(const Eigen::Vector3d& c) const = 0;
  /// End effector on the object surface, the arm pointing along `heading`.
  virtual Eigen::VectorXd grasp_configuration(const Eigen::Vector3d& object_center, double object_radius,
                                              double heading) const = 0;
  /// Configuration and joint velocity of a member for a given object pose/velocity.
  virtual Eigen::VectorXd attached_configuration(const GraspAttachment& a, const Vector6d& object_pose) const = 0;
  virtual Eigen::VectorXd attached_velocity(const GraspAttachment& a, const Vector6d& object_pose,
                                            const Vector6d& object_velocity) const = 0;
};

struct ExampleAgentParams {
  double base_mass = 0.5;
  Eigen::Vector3d base_size{0.5, 0.5, 0.2};
  double link_length = 1.0;
  double link_mass = 0.5;
  double rod_radius = 0.05;
  double radius = 1.25;
  Eigen::Vector2d rest{0.7853981633974483, 0.7853981633974483};
  int capability = 1;
};

/// Planar base [x, y] with a vertical column (yaw q1) and a pitched link (q2).
/// The bounding sphere is centered under the base.
std::shared_ptr<const AgentModel> example_agent_model(const ExampleAgentParams& params = {});

struct ObjectModel {
  double mass = 0.5;
  double radius = 0.5;
  Eigen::Matrix3d body_inertia = Eigen::Matrix3d::Identity() * 0.05;  // about the center, body frame

  static ObjectModel solid_sphere(double mass, double radius);

  Matrix6d inertia(const Vector6d& pose) const;
  Matrix6d coriolis(const Vector6d& pose, const Vector6d& v) const;
  Vector6d gravity() const;
};

struct TeamMember {
  const AgentModel* model = nullptr;
  GraspAttachment attachment;
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
};

struct CoupledState {
  std::vector<TeamMember> members;
  Vector6d pose = Vector6d::Zero();  // position, Euler angles
  Vector6d v = Vector6d::Zero();     // linear, angular (inertial frame)
};

Matrix6d agent_object_jacobian(const GraspAttachment& a, const AgentModel& model, const Eigen::VectorXd& q);
/// Time derivative of agent_object_jacobian along qd.
Matrix6d agent_object_jacobian_dot(const GraspAttachment& a, const AgentModel& model, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qd);
Eigen::MatrixXd grasp_matrix(const CoupledState& s);
Eigen::MatrixXd grasp_matrix_dot(const CoupledState& s);

struct CoupledTerms {
  Matrix6d M;
  Matrix6d C;
  Vector6d g;
};

CoupledTerms coupled_terms(const CoupledState& s, const ObjectModel& object);

/// Solves B qdd + N qd + g = tau - J^T f.
Eigen::VectorXd agent_accel(const AgentModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                            const Eigen::VectorXd& tau, const Vector6d& f = Vector6d::Zero());

/// Solves M v' + C v + g = G^T u for the stacked member wrenches u.
Vector6d coupled_accel(const CoupledState& s, const ObjectModel& object, const Eigen::VectorXd& u);

/// Selects (vx, vy, wz) out of a 6-vector.
Eigen::Matrix<double, 6, 3> planar_selection();

}  // namespace coplan
