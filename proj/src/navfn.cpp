#include "coplan/navfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coplan {

int NavScenario::dim() const {
  int n = 0;
  for (const auto& a : agents) n += a.model->dof();
  return n + 3 * static_cast<int>(teams.size());
}

Eigen::VectorXd stack(const NavScenario& sc, const NavState& x) {
  Eigen::VectorXd z(sc.dim());
  int o = 0;
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    int n = sc.agents[i].model->dof();
    z.segment(o, n) = x.q[i];
    o += n;
  }
  for (std::size_t t = 0; t < sc.teams.size(); ++t, o += 3) z.segment<3>(o) = x.p[t];
  return z;
}

NavState unstack(const NavScenario& sc, const Eigen::VectorXd& z) {
  NavState x;
  int o = 0;
  for (const auto& a : sc.agents) {
    int n = a.model->dof();
    x.q.push_back(z.segment(o, n));
    o += n;
  }
  for (std::size_t t = 0; t < sc.teams.size(); ++t, o += 3) x.p.push_back(z.segment<3>(o));
  return x;
}

double goal_gamma(const NavScenario& sc, const NavState& x) {
  if (x.q.size() != sc.agents.size() || x.p.size() != sc.teams.size())
    throw std::invalid_argument("goal_gamma: state does not match scenario");
  double g = 0.0;
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    if (x.q[i].size() != sc.agents[i].goal.size()) throw std::invalid_argument("goal_gamma: dimension mismatch");
    g += (x.q[i] - sc.agents[i].goal).squaredNorm();
  }
  for (std::size_t t = 0; t < sc.teams.size(); ++t) g += (x.p[t] - sc.teams[t].goal).squaredNorm();
  return g;
}

namespace {

// Center, radius and d(center)/d(stacked coordinates) for one mover.
struct MoverGeom {
  Eigen::Vector3d c;
  double r;
  Eigen::MatrixXd dc;  // 3 x dim
};

std::vector<MoverGeom> mover_geometry(const NavScenario& sc, const NavState& x, bool with_gradient) {
  std::vector<MoverGeom> out;
  int n = sc.dim(), o = 0;
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    const auto& m = *sc.agents[i].model;
    MoverGeom g{m.bounding_center(x.q[i]), m.bounding_radius(), {}};
    if (with_gradient) {
      g.dc = Eigen::MatrixXd::Zero(3, n);
      g.dc.middleCols(o, m.dof()) = m.bounding_center_jacobian(x.q[i]);
    }
    o += m.dof();
    out.push_back(std::move(g));
  }
  for (std::size_t t = 0; t < sc.teams.size(); ++t, o += 3) {
    MoverGeom g{x.p[t] + sc.teams[t].offset, sc.teams[t].radius, {}};
    if (with_gradient) {
      g.dc = Eigen::MatrixXd::Zero(3, n);
      g.dc.middleCols<3>(o).setIdentity();
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

std::vector<Beta> beta_catalog(const NavScenario& sc, const NavState& x, bool with_gradient) {
  auto mg = mover_geometry(sc, x, with_gradient);
  const int na = static_cast<int>(sc.agents.size());
  auto tag = [&](int m) { return m < na ? "a" + std::to_string(m) : "T" + std::to_string(m - na); };
  auto forbidden = [&](int m) -> const std::vector<int>& {
    return m < na ? sc.agents[m].forbidden : sc.teams[m - na].forbidden;
  };
  std::vector<Beta> out;
  auto pair_beta = [&](std::string id, int a, const Eigen::Vector3d& c2, double r2, const Eigen::MatrixXd* dc2) {
    Beta b;
    b.id = std::move(id);
    Eigen::Vector3d d = mg[a].c - c2;
    double rs = mg[a].r + r2;
    b.value = d.squaredNorm() - rs * rs;
    if (with_gradient) {
      b.grad = 2.0 * mg[a].dc.transpose() * d;
      if (dc2) b.grad -= 2.0 * dc2->transpose() * d;
    }
    out.push_back(std::move(b));
  };
  const int nm = static_cast<int>(mg.size());
  for (int a = 0; a < nm; ++a)
    for (int b = a + 1; b < nm; ++b)
      pair_beta(tag(a) + "-" + tag(b), a, mg[b].c, mg[b].r, with_gradient ? &mg[b].dc : nullptr);
  for (int a = 0; a < nm; ++a)
    for (std::size_t s = 0; s < sc.statics.size(); ++s)
      pair_beta(tag(a) + "-s" + std::to_string(s), a, sc.statics[s].center, sc.statics[s].radius, nullptr);
  for (int a = 0; a < nm; ++a)
    for (int k : forbidden(a))
      pair_beta(tag(a) + "-pi" + std::to_string(sc.regions[k].id), a, sc.regions[k].center, sc.regions[k].radius,
                nullptr);
  for (int a = 0; a < nm; ++a) {
    Beta b;
    b.id = tag(a) + "-W";
    b.workspace = true;
    double rr = sc.r0 - mg[a].r;
    b.value = rr * rr - mg[a].c.squaredNorm();
    if (with_gradient) b.grad = -2.0 * mg[a].dc.transpose() * mg[a].c;
    out.push_back(std::move(b));
  }
  return out;
}

double rvf(double b, double B, double lambda, double h) {
  double Bh = std::pow(B, 1.0 / h);
  if (b + Bh == 0.0) return 0.0;
  return b + lambda * b / (b + Bh);
}

namespace {

struct LogG {
  double log_G = -std::numeric_limits<double>::infinity();
  double min_beta = std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad;  // of log G
};

LogG log_obstacle(const NavScenario& sc, const NavState& x, bool with_gradient) {
  auto betas = beta_catalog(sc, x, with_gradient);
  LogG r;
  for (const auto& b : betas) r.min_beta = std::min(r.min_beta, b.value);
  if (r.min_beta <= 0.0) return r;
  const double lambda = sc.params.lambda, h = sc.params.h;
  double sum_rel = 0.0;
  Eigen::VectorXd sum_rel_grad;
  if (with_gradient) sum_rel_grad = Eigen::VectorXd::Zero(sc.dim());
  double lg = 0.0;
  Eigen::VectorXd grad;
  if (with_gradient) grad = Eigen::VectorXd::Zero(sc.dim());
  for (const auto& b : betas) {
    if (b.workspace) {
      lg += std::log(b.value);
      if (with_gradient) grad += b.grad / b.value;
    } else {
      sum_rel += std::log(b.value);
      if (with_gradient) sum_rel_grad += b.grad / b.value;
    }
  }
  for (const auto& b : betas) {
    if (b.workspace) continue;
    double lb = std::log(b.value);
    double log_Bh = (sum_rel - lb) / h;
    // q = b / (b + B^(1/h)) written as a logistic in the log-ratio
    double q = 1.0 / (1.0 + std::exp(log_Bh - lb));
    double g = b.value + lambda * q;
    lg += std::log(g);
    if (with_gradient) {
      Eigen::VectorXd dlogb = b.grad / b.value;
      Eigen::VectorXd dlogBh = (sum_rel_grad - dlogb) / h;
      Eigen::VectorXd dg = b.grad + lambda * q * (1.0 - q) * (dlogb - dlogBh);
      grad += dg / g;
    }
  }
  r.log_G = lg;
  if (with_gradient) r.grad = std::move(grad);
  return r;
}

double log_sum_exp(double a, double b) {
  double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

double obstacle_G(const NavScenario& sc, const NavState& x) {
  auto r = log_obstacle(sc, x, false);
  return std::exp(r.log_G);
}

double navfn_value(const NavScenario& sc, const NavState& x) {
  double gamma = goal_gamma(sc, x);
  if (gamma == 0.0) return 0.0;
  auto r = log_obstacle(sc, x, false);
  if (r.log_G == -std::numeric_limits<double>::infinity()) return 1.0;
  const double k = sc.params.kappa;
  double lg = std::log(gamma);
  double logD = log_sum_exp(k * lg, r.log_G);
  return std::min(1.0, std::exp(lg - logD / k));
}

NavEvaluation navfn_gradient(const NavScenario& sc, const NavState& x) {
  NavEvaluation e;
  e.gamma = goal_gamma(sc, x);
  auto r = log_obstacle(sc, x, true);
  e.log_G = r.log_G;
  e.min_beta = r.min_beta;
  if (r.log_G == -std::numeric_limits<double>::infinity())
    throw std::domain_error("navfn_gradient: state is on the obstacle set");
  const double k = sc.params.kappa;
  Eigen::VectorXd z = stack(sc, x), zg(z.size());
  int o = 0;
  for (const auto& a : sc.agents) {
    zg.segment(o, a.model->dof()) = a.goal;
    o += a.model->dof();
  }
  for (const auto& t : sc.teams) {
    zg.segment<3>(o) = t.goal;
    o += 3;
  }
  Eigen::VectorXd dgamma = 2.0 * (z - zg);
  if (e.gamma == 0.0) {
    e.value = 0.0;
    e.gradient = Eigen::VectorXd::Zero(z.size());
  } else {
    double lg = std::log(e.gamma);
    double logD = log_sum_exp(k * lg, r.log_G);
    e.value = std::min(1.0, std::exp(lg - logD / k));
    double coeff = std::exp(r.log_G - (1.0 + 1.0 / k) * logD);
    e.gradient = coeff * (dgamma - (e.gamma / k) * r.grad);
  }
  o = 0;
  for (const auto& a : sc.agents) {
    e.agent_gradient.push_back(e.gradient.segment(o, a.model->dof()));
    o += a.model->dof();
  }
  for (std::size_t t = 0; t < sc.teams.size(); ++t, o += 3) e.team_gradient.push_back(e.gradient.segment<3>(o));
  return e;
}

}  // namespace coplan
