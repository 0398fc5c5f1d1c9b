#include "coplan/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/AutoDiff>

namespace coplan {

Matrix6d euler_rate_jacobian(const Vector6d& pose, double margin) {
  Eigen::Vector3d eta = pose.tail<3>();
  if (std::abs(eta(1)) >= std::numbers::pi / 2 - margin)
    throw SingularityError("Euler pitch at representation singularity");
  Matrix6d J = Matrix6d::Identity();
  J.bottomRightCorner<3, 3>() = euler_rate_matrix<double>(eta).inverse();
  return J;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

bool AgentModel::in_valid_set(const Eigen::VectorXd& q, double tol) const {
  Matrix3Xd Jp = planar_jacobian(q);
  return (Jp * Jp.transpose()).determinant() > tol;
}

namespace {

template <class S>
using V3 = Eigen::Matrix<S, 3, 1>;
template <class S>
using M3 = Eigen::Matrix<S, 3, 3>;

struct Geometry {
  double mb, ml, l, hb, top, rho;
  Eigen::Vector3d box;
};

template <class S>
struct Frames {
  V3<S> p_base, p_l1, p_l2, ee, w1, d2, a2;
  M3<S> R1, R2;
  S reach;  // horizontal base to end-effector distance
};

// Column of length l standing on the base (yaw q1 about its axis), second
// link of length l pitched by q2 at the column top.
template <class S>
Frames<S> frames(const Geometry& g, const Eigen::Matrix<S, 4, 1>& q) {
  using std::cos;
  using std::sin;
  Frames<S> f;
  S c1 = cos(q(2)), s1 = sin(q(2)), c2 = cos(q(3)), s2 = sin(q(3));
  V3<S> u2(c2 * c1, c2 * s1, s2), sh(q(0), q(1), S(g.top + g.l));
  f.w1 = V3<S>(-s1, c1, S(0));
  f.d2 = V3<S>(-s2 * c1, -s2 * s1, c2);
  f.a2 = V3<S>(s1, -c1, S(0));
  f.p_base = V3<S>(q(0), q(1), S(g.hb));
  f.p_l1 = V3<S>(q(0), q(1), S(g.top + 0.5 * g.l));
  f.p_l2 = sh + S(0.5 * g.l) * u2;
  f.ee = sh + S(g.l) * u2;
  Eigen::Matrix<S, 3, 1> yaw(S(0), S(0), q(2)), yp(S(0), -q(3), q(2));
  f.R1 = euler_to_rotation<S>(yaw);
  f.R2 = euler_to_rotation<S>(yp);
  f.reach = S(g.l) * c2;
  return f;
}

template <class S>
void rod_inertias(const Geometry& g, M3<S>& column, M3<S>& link) {
  double t = g.ml * g.l * g.l / 12.0, a = 0.5 * g.ml * g.rho * g.rho;
  column = M3<S>::Zero();
  column(0, 0) = column(1, 1) = S(t);
  column(2, 2) = S(a);
  link = M3<S>::Zero();
  link(0, 0) = S(a);
  link(1, 1) = link(2, 2) = S(t);
}

template <class S>
Eigen::Matrix<S, 4, 4> inertia_t(const Geometry& g, const Eigen::Matrix<S, 4, 1>& q) {
  using std::cos;
  auto f = frames<S>(g, q);
  S c2 = cos(q(3));
  Eigen::Matrix<S, 3, 4> Jb = Eigen::Matrix<S, 3, 4>::Zero(), J2, W1 = Eigen::Matrix<S, 3, 4>::Zero(), W2;
  Jb(0, 0) = S(1);
  Jb(1, 1) = S(1);
  J2 = Jb;
  J2.col(2) = S(0.5 * g.l) * c2 * f.w1;
  J2.col(3) = S(0.5 * g.l) * f.d2;
  W1(2, 2) = S(1);
  W2 = W1;
  W2.col(3) = f.a2;
  M3<S> Ic, Il;
  rod_inertias<S>(g, Ic, Il);
  M3<S> I1 = f.R1 * Ic * f.R1.transpose(), I2 = f.R2 * Il * f.R2.transpose();
  Eigen::Matrix<S, 4, 4> B = S(g.mb + g.ml) * Jb.transpose() * Jb + S(g.ml) * J2.transpose() * J2 +
                             W1.transpose() * I1 * W1 + W2.transpose() * I2 * W2;
  return B;
}

// Mass, center of mass and inertia about it for the frozen posture.
template <class S>
void rigid_body_t(const Geometry& g, const Eigen::Matrix<S, 4, 1>& q, S& mass, V3<S>& com, M3<S>& Ic) {
  auto f = frames<S>(g, q);
  mass = S(g.mb + 2.0 * g.ml);
  com = (S(g.mb) * f.p_base + S(g.ml) * f.p_l1 + S(g.ml) * f.p_l2) / mass;
  M3<S> Icol, Ilink;
  rod_inertias<S>(g, Icol, Ilink);
  M3<S> Ibox = M3<S>::Zero();
  const auto& b = g.box;
  Ibox(0, 0) = S(g.mb / 12.0 * (b(1) * b(1) + b(2) * b(2)));
  Ibox(1, 1) = S(g.mb / 12.0 * (b(0) * b(0) + b(2) * b(2)));
  Ibox(2, 2) = S(g.mb / 12.0 * (b(0) * b(0) + b(1) * b(1)));
  auto shift = [&](double m, const V3<S>& p) {
    V3<S> r = p - com;
    return M3<S>(S(m) * (r.squaredNorm() * M3<S>::Identity() - r * r.transpose()));
  };
  Ic = f.R1 * Ibox * f.R1.transpose() + f.R1 * Icol * f.R1.transpose() + f.R2 * Ilink * f.R2.transpose() +
       shift(g.mb, f.p_base) + shift(g.ml, f.p_l1) + shift(g.ml, f.p_l2);
}

using AD4 = Eigen::AutoDiffScalar<Eigen::Vector4d>;
using AD1 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;

Eigen::Matrix<AD4, 4, 1> seed4(const Eigen::VectorXd& q) {
  Eigen::Matrix<AD4, 4, 1> x;
  for (int i = 0; i < 4; ++i) x(i) = AD4(q(i), 4, i);
  return x;
}

Eigen::Matrix<AD1, 4, 1> seed_dir(const Eigen::VectorXd& q, const Eigen::VectorXd& dir) {
  Eigen::Matrix<AD1, 4, 1> x;
  for (int i = 0; i < 4; ++i) {
    x(i).value() = q(i);
    x(i).derivatives()(0) = dir(i);
  }
  return x;
}

class ExampleAgent final : public AgentModel {
 public:
  explicit ExampleAgent(const ExampleAgentParams& p) : p_(p) {
    g_.mb = p.base_mass;
    g_.ml = p.link_mass;
    g_.l = p.link_length;
    g_.top = p.base_size(2);
    g_.hb = 0.5 * p.base_size(2);
    g_.rho = p.rod_radius;
    g_.box = p.base_size;
  }

  int dof() const override { return 4; }

  Eigen::MatrixXd inertia(const Eigen::VectorXd& q) const override {
    return inertia_t<double>(g_, q.head<4>());
  }

  Eigen::MatrixXd coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const override {
    auto B = inertia_t<AD4>(g_, seed4(q));
    // Christoffel symbols of the first kind
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(4, 4);
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
          double c = 0.5 * (B(k, j).derivatives()(i) + B(k, i).derivatives()(j) - B(i, j).derivatives()(k));
          N(k, j) += c * qd(i);
        }
    return N;
  }

  Eigen::VectorXd gravity(const Eigen::VectorXd& q) const override {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
    g(3) = g_.ml * kGravity * 0.5 * g_.l * std::cos(q(3));
    return g;
  }

  Eigen::Vector3d ee_position(const Eigen::VectorXd& q) const override {
    return frames<double>(g_, q.head<4>()).ee;
  }
  Eigen::Vector3d ee_euler(const Eigen::VectorXd& q) const override { return {0.0, -q(3), wrap_angle(q(2))}; }
  Eigen::Matrix3d ee_rotation(const Eigen::VectorXd& q) const override {
    return frames<double>(g_, q.head<4>()).R2;
  }

  Matrix6Xd jacobian(const Eigen::VectorXd& q) const override {
    auto f = frames<double>(g_, q.head<4>());
    Matrix6Xd J = Matrix6Xd::Zero(6, 4);
    J(0, 0) = J(1, 1) = 1.0;
    J.block<3, 1>(0, 2) = f.reach * f.w1;
    J.block<3, 1>(0, 3) = g_.l * f.d2;
    J(5, 2) = 1.0;
    J.block<3, 1>(3, 3) = f.a2;
    return J;
  }

  Matrix3Xd planar_jacobian(const Eigen::VectorXd& q) const override {
    Matrix6Xd J = jacobian(q);
    Matrix3Xd Jp(3, 4);
    Jp.row(0) = J.row(0);
    Jp.row(1) = J.row(1);
    Jp.row(2) = J.row(5);
    return Jp;
  }

  Eigen::Vector3d bounding_center(const Eigen::VectorXd& q) const override { return {q(0), q(1), 0.0}; }

  Matrix3Xd bounding_center_jacobian(const Eigen::VectorXd&) const override {
    Matrix3Xd J = Matrix3Xd::Zero(3, 4);
    J(0, 0) = 1.0;
    J(1, 1) = 1.0;
    return J;
  }

  double bounding_radius() const override { return p_.radius; }
  int capability() const override { return p_.capability; }

  Matrix6d member_inertia(const Eigen::VectorXd& q) const override {
    double m;
    Eigen::Vector3d com;
    Eigen::Matrix3d Ic;
    rigid_body_t<double>(g_, q.head<4>(), m, com, Ic);
    Eigen::Vector3d r = com - ee_position(q);
    Matrix6d X = Matrix6d::Identity();
    X.topRightCorner<3, 3>() = -skew<double>(r);
    Matrix6d Mc = Matrix6d::Zero();
    Mc.topLeftCorner<3, 3>() = m * Eigen::Matrix3d::Identity();
    Mc.bottomRightCorner<3, 3>() = Ic;
    return X.transpose() * Mc * X;
  }

  Matrix6d member_coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) const override {
    AD1 m;
    V3<AD1> com, ee;
    M3<AD1> Ic;
    auto x = seed_dir(q, qd);
    rigid_body_t<AD1>(g_, x, m, com, Ic);
    ee = frames<AD1>(g_, x).ee;
    Eigen::Vector3d r, rd;
    Eigen::Matrix3d I, Id;
    for (int a = 0; a < 3; ++a) {
      r(a) = (com(a) - ee(a)).value();
      rd(a) = (com(a) - ee(a)).derivatives()(0);
      for (int b = 0; b < 3; ++b) {
        I(a, b) = Ic(a, b).value();
        Id(a, b) = Ic(a, b).derivatives()(0);
      }
    }
    Eigen::Vector3d w = jacobian(q).bottomRows<3>() * qd;
    Eigen::Matrix3d Sw = skew<double>(w);
    Matrix6d X = Matrix6d::Identity(), Xd = Matrix6d::Zero(), Mc = Matrix6d::Zero(), Cc = Matrix6d::Zero();
    X.topRightCorner<3, 3>() = -skew<double>(r);
    Xd.topRightCorner<3, 3>() = -skew<double>(rd);
    Mc.topLeftCorner<3, 3>() = m.value() * Eigen::Matrix3d::Identity();
    Mc.bottomRightCorner<3, 3>() = I;
    Cc.bottomRightCorner<3, 3>() = 0.5 * Id + 0.5 * (Sw * I + I * Sw);
    return X.transpose() * Mc * Xd + X.transpose() * Cc * X;
  }

  Vector6d member_gravity(const Eigen::VectorXd& q) const override {
    double m;
    Eigen::Vector3d com;
    Eigen::Matrix3d Ic;
    rigid_body_t<double>(g_, q.head<4>(), m, com, Ic);
    Eigen::Vector3d r = com - ee_position(q);
    Vector6d g;
    g.head<3>() = Eigen::Vector3d(0, 0, m * kGravity);
    g.tail<3>() = m * kGravity * r.cross(Eigen::Vector3d::UnitZ());
    return g;
  }

  Eigen::VectorXd configuration_for_center(const Eigen::Vector3d& c) const override {
    Eigen::VectorXd q(4);
    q << c(0), c(1), p_.rest(0), p_.rest(1);
    return q;
  }

  Eigen::VectorXd grasp_configuration(const Eigen::Vector3d& oc, double orad, double heading) const override {
    double s2 = std::clamp((oc(2) - g_.top - g_.l) / g_.l, -0.95, 0.95);
    double q2 = std::asin(s2);
    Eigen::Vector2d d(std::cos(heading), std::sin(heading));
    Eigen::Vector2d base = oc.head<2>() - (orad + g_.l * std::cos(q2)) * d;
    Eigen::VectorXd out(4);
    out << base(0), base(1), wrap_angle(heading), q2;
    return out;
  }

  Eigen::VectorXd attached_configuration(const GraspAttachment& a, const Vector6d& pose) const override {
    double q1 = wrap_angle(pose(5) + a.eta_offset(2));
    double q2 = a.q_grasp(3);
    Eigen::VectorXd q(4);
    q << 0, 0, q1, q2;
    Eigen::Vector3d ee = pose.head<3>() + ee_rotation(q) * a.p_offset;
    double reach = g_.l * std::cos(q2);
    q(0) = ee(0) - reach * std::cos(q1);
    q(1) = ee(1) - reach * std::sin(q1);
    return q;
  }

  Eigen::VectorXd attached_velocity(const GraspAttachment& a, const Vector6d& pose,
                                    const Vector6d& v) const override {
    Eigen::VectorXd q = attached_configuration(a, pose);
    double q1 = q(2), q2 = q(3);
    Eigen::Vector3d w = v.tail<3>();
    Eigen::Vector3d eed = v.head<3>() + w.cross(ee_rotation(q) * a.p_offset);
    double reach = g_.l * std::cos(q2);
    Eigen::VectorXd qd(4);
    qd(2) = w(2);
    qd(3) = 0.0;
    qd(0) = eed(0) + reach * std::sin(q1) * qd(2);
    qd(1) = eed(1) - reach * std::cos(q1) * qd(2);
    return qd;
  }

 private:
  ExampleAgentParams p_;
  Geometry g_;
};

}  // namespace

std::shared_ptr<const AgentModel> example_agent_model(const ExampleAgentParams& params) {
  return std::make_shared<ExampleAgent>(params);
}

ObjectModel ObjectModel::solid_sphere(double mass, double radius) {
  ObjectModel o;
  o.mass = mass;
  o.radius = radius;
  o.body_inertia = Eigen::Matrix3d::Identity() * (0.4 * mass * radius * radius);
  return o;
}

Matrix6d ObjectModel::inertia(const Vector6d& pose) const {
  Eigen::Matrix3d R = euler_to_rotation<double>(pose.tail<3>());
  Matrix6d M = Matrix6d::Zero();
  M.topLeftCorner<3, 3>() = mass * Eigen::Matrix3d::Identity();
  M.bottomRightCorner<3, 3>() = R * body_inertia * R.transpose();
  return M;
}

Matrix6d ObjectModel::coriolis(const Vector6d& pose, const Vector6d& v) const {
  Eigen::Matrix3d R = euler_to_rotation<double>(pose.tail<3>());
  Matrix6d C = Matrix6d::Zero();
  C.bottomRightCorner<3, 3>() = skew<double>(v.tail<3>()) * R * body_inertia * R.transpose();
  return C;
}

Vector6d ObjectModel::gravity() const {
  Vector6d g = Vector6d::Zero();
  g(2) = mass * kGravity;
  return g;
}

Matrix6d agent_object_jacobian(const GraspAttachment& a, const AgentModel& model, const Eigen::VectorXd& q) {
  Matrix6d J = Matrix6d::Identity();
  J.topRightCorner<3, 3>() = -skew<double>(model.ee_rotation(q) * a.p_offset);
  return J;
}

Matrix6d agent_object_jacobian_dot(const GraspAttachment& a, const AgentModel& model, const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qd) {
  Eigen::Vector3d w = model.jacobian(q).bottomRows<3>() * qd;
  Eigen::Vector3d rp = model.ee_rotation(q) * a.p_offset;
  Matrix6d Jd = Matrix6d::Zero();
  Jd.topRightCorner<3, 3>() = -skew<double>(w.cross(rp));
  return Jd;
}

Eigen::MatrixXd grasp_matrix(const CoupledState& s) {
  Eigen::MatrixXd G(6 * s.members.size(), 6);
  for (std::size_t k = 0; k < s.members.size(); ++k) {
    const auto& m = s.members[k];
    if (m.attachment.object != s.members[0].attachment.object)
      throw std::invalid_argument("grasp_matrix: members hold different objects");
    G.block<6, 6>(6 * k, 0) = agent_object_jacobian(m.attachment, *m.model, m.q);
  }
  return G;
}

Eigen::MatrixXd grasp_matrix_dot(const CoupledState& s) {
  Eigen::MatrixXd G(6 * s.members.size(), 6);
  for (std::size_t k = 0; k < s.members.size(); ++k) {
    const auto& m = s.members[k];
    G.block<6, 6>(6 * k, 0) = agent_object_jacobian_dot(m.attachment, *m.model, m.q, m.qd);
  }
  return G;
}

CoupledTerms coupled_terms(const CoupledState& s, const ObjectModel& object) {
  CoupledTerms t;
  t.M = object.inertia(s.pose);
  t.C = object.coriolis(s.pose, s.v);
  t.g = object.gravity();
  for (const auto& m : s.members) {
    if (!m.model->in_valid_set(m.q)) throw SingularityError("team member at a kinematic singularity");
    Matrix6d G = agent_object_jacobian(m.attachment, *m.model, m.q);
    Matrix6d Gd = agent_object_jacobian_dot(m.attachment, *m.model, m.q, m.qd);
    Matrix6d Mi = m.model->member_inertia(m.q);
    t.M += G.transpose() * Mi * G;
    t.C += G.transpose() * Mi * Gd + G.transpose() * m.model->member_coriolis(m.q, m.qd) * G;
    t.g += G.transpose() * m.model->member_gravity(m.q);
  }
  return t;
}

Eigen::VectorXd agent_accel(const AgentModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                            const Eigen::VectorXd& tau, const Vector6d& f) {
  Eigen::MatrixXd B = model.inertia(q);
  Eigen::VectorXd rhs = tau - model.coriolis(q, qd) * qd - model.gravity(q);
  if (!f.isZero(0.0)) rhs -= model.jacobian(q).transpose() * f;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw std::runtime_error("agent inertia is not positive definite");
  return llt.solve(rhs);
}

Vector6d coupled_accel(const CoupledState& s, const ObjectModel& object, const Eigen::VectorXd& u) {
  auto t = coupled_terms(s, object);
  Vector6d rhs = grasp_matrix(s).transpose() * u - t.C * s.v - t.g;
  return t.M.llt().solve(rhs);
}

Eigen::Matrix<double, 6, 3> planar_selection() {
  Eigen::Matrix<double, 6, 3> P = Eigen::Matrix<double, 6, 3>::Zero();
  P(0, 0) = 1.0;
  P(1, 1) = 1.0;
  P(5, 2) = 1.0;
  return P;
}

}  // namespace coplan
