#include "coplan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace coplan {

namespace {

constexpr int kHeadings = 72;

int region_of(const Eigen::Vector3d& c, double r, const std::vector<Region>& regions, double slack = 0.0) {
  for (std::size_t k = 0; k < regions.size(); ++k)
    if (ball_in_region(c, r, regions[k], slack)) return static_cast<int>(k);
  return -1;
}

double gap(const BoundingSphere& a, const BoundingSphere& b) {
  return (a.center - b.center).norm() - a.radius - b.radius;
}

// 0, +d, -d, +2d, -2d, ... around `center`
std::vector<double> headings_around(double center) {
  std::vector<double> h{center};
  const double d = 2.0 * std::numbers::pi / kHeadings;
  for (int k = 1; k <= kHeadings / 2; ++k) {
    h.push_back(center + k * d);
    if (k < kHeadings / 2) h.push_back(center - k * d);
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------- log

std::string TrajectoryLog::csv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << "\n";
  }
  return os.str();
}

std::string TrajectoryLog::events_text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  for (const auto& e : events) os << e.t << "\t" << e.kind << "\t" << e.detail << "\n";
  return os.str();
}

std::uint64_t TrajectoryLog::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto eat = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& r : rows) eat(r.data(), r.size() * sizeof(double));
  for (const auto& e : events) {
    eat(&e.t, sizeof e.t);
    eat(e.kind.data(), e.kind.size());
    eat(e.detail.data(), e.detail.size());
  }
  return h;
}

// ---------------------------------------------------------------- simulator

Simulator::Simulator(const Scenario& sc)
    : sc_(sc), problem_(sc.discrete()), models_(sc.models()), objects_(sc.object_models()), rng_(sc.sim.seed) {}

SimState Simulator::initial_state() const {
  SimState s;
  for (const auto& a : sc_.agents) {
    s.q.push_back(a.q0);
    s.qd.push_back(Eigen::VectorXd::Zero(a.q0.size()));
    s.attach.emplace_back();
  }
  for (const auto& o : sc_.objects) {
    s.pose.push_back(o.pose);
    s.v.push_back(Vector6d::Zero());
  }
  return s;
}

DiscreteState Simulator::abstract(const SimState& s) const {
  DiscreteState d;
  for (std::size_t i = 0; i < s.q.size(); ++i) {
    d.agent_region.push_back(
        region_of(models_[i]->bounding_center(s.q[i]), models_[i]->bounding_radius(), problem_.regions));
    d.holds.push_back(s.attach[i] ? s.attach[i]->object : -1);
  }
  for (std::size_t j = 0; j < s.pose.size(); ++j)
    d.object_region.push_back(region_of(s.pose[j].head<3>(), objects_[j].radius, problem_.regions));
  return d;
}

std::vector<BoundingSphere> Simulator::spheres(const SimState& s, std::vector<std::pair<int, int>>* exempt) const {
  const int N = static_cast<int>(s.q.size());
  std::vector<BoundingSphere> out;
  for (int i = 0; i < N; ++i) out.push_back({models_[i]->bounding_center(s.q[i]), models_[i]->bounding_radius()});
  for (std::size_t j = 0; j < s.pose.size(); ++j) out.push_back({s.pose[j].head<3>(), objects_[j].radius});
  if (exempt) {
    exempt->clear();
    for (int i = 0; i < N; ++i) {
      if (!s.attach[i]) continue;
      exempt->push_back({i, N + s.attach[i]->object});
      for (int k = i + 1; k < N; ++k)
        if (s.attach[k] && s.attach[k]->object == s.attach[i]->object) exempt->push_back({i, k});
    }
  }
  return out;
}

double Simulator::clearance(const SimState& s) const {
  std::vector<std::pair<int, int>> ex;
  auto b = spheres(s, &ex);
  const int N = static_cast<int>(s.q.size());
  // bodies swallowed by a transporting team are replaced by its sphere
  std::vector<char> hidden(b.size(), 0);
  for (const auto& m : ep_.movers) {
    if (!m.team) continue;
    hidden[N + m.object] = 1;
    for (int a : m.members) hidden[a] = 1;
    Eigen::Vector3d c = s.pose[m.object].head<3>();
    c(2) = 0.0;
    b.push_back({c, sc_.team_radius});
    hidden.push_back(0);
  }
  auto is_exempt = [&](int a, int c) {
    for (auto [x, y] : ex)
      if ((x == a && y == c) || (x == c && y == a)) return true;
    return false;
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < b.size(); ++a) {
    if (hidden[a]) continue;
    for (std::size_t c = a + 1; c < b.size(); ++c) {
      if (hidden[c] || is_exempt(static_cast<int>(a), static_cast<int>(c))) continue;
      best = std::min(best, gap(b[a], b[c]));
    }
  }
  return best;
}

void Simulator::apply_grasp(SimState& s, int agent, int object, TrajectoryLog& log) {
  const auto& model = *models_[agent];
  const int N = static_cast<int>(s.q.size());
  Eigen::Vector3d oc = s.pose[object].head<3>();
  int region = region_of(oc, objects_[object].radius, problem_.regions);
  if (region < 0) throw SimAbort("mismatch", "grasped object is outside every region");
  Eigen::Vector3d c0 = model.bounding_center(s.q[agent]);
  double preferred = std::atan2(oc(1) - c0(1), oc(0) - c0(0));
  auto bodies = spheres(s);
  for (int pass = 0; pass < 2; ++pass) {
    for (double h : headings_around(preferred)) {
      Eigen::VectorXd qg = model.grasp_configuration(oc, objects_[object].radius, h);
      BoundingSphere me{model.bounding_center(qg), model.bounding_radius()};
      if (!ball_in_region(me.center, me.radius, problem_.regions[region], sc_.sim.region_slack)) continue;
      bool ok = true;
      for (int k = 0; k < static_cast<int>(bodies.size()) && ok; ++k) {
        if (k == agent || k == N + object) continue;
        bool co_holder = k < N && s.attach[k] && s.attach[k]->object == object;
        if (co_holder && pass == 1) continue;
        ok = gap(me, bodies[k]) >= 0.0;
      }
      if (!ok) continue;
      GraspAttachment a;
      a.agent = agent;
      a.object = object;
      Eigen::Matrix3d R = model.ee_rotation(qg);
      a.p_offset = R.transpose() * (model.ee_position(qg) - oc);
      a.eta_offset = Eigen::Vector3d(0.0, 0.0, wrap_angle(qg(2) - s.pose[object](5)));
      a.q_grasp = qg;
      s.q[agent] = qg;
      s.qd[agent].setZero();
      s.attach[agent] = a;
      std::ostringstream d;
      d << sc_.agents[agent].name << " grasps " << sc_.objects[object].name << " heading " << std::setprecision(6)
        << h;
      log.events.push_back({s.t, "grasp", d.str()});
      return;
    }
  }
  throw SimAbort("grasp", "no collision-free grasp pose for agent " + sc_.agents[agent].name);
}

void Simulator::apply_release(SimState& s, int agent, TrajectoryLog& log) {
  const auto& model = *models_[agent];
  if (!s.attach[agent]) return;
  int object = s.attach[agent]->object;
  s.attach[agent].reset();
  const int N = static_cast<int>(s.q.size());
  Eigen::Vector3d oc = s.pose[object].head<3>();
  Eigen::Vector3d c0 = model.bounding_center(s.q[agent]);
  int region = region_of(c0, model.bounding_radius(), problem_.regions);
  if (region < 0) region = region_of(oc, objects_[object].radius, problem_.regions);
  double away = std::atan2(c0(1) - oc(1), c0(0) - oc(0));
  auto bodies = spheres(s);
  const double r = model.bounding_radius(), ro = objects_[object].radius;
  for (double rho = r + ro + 0.05; rho <= r + ro + 1.5; rho += 0.05) {
    for (double h : headings_around(away)) {
      Eigen::Vector3d c(oc(0) + rho * std::cos(h), oc(1) + rho * std::sin(h), 0.0);
      if (!ball_in_region(c, r, problem_.regions[region], sc_.sim.region_slack)) continue;
      BoundingSphere me{c, r};
      bool ok = true;
      for (int k = 0; k < static_cast<int>(bodies.size()) && ok; ++k) {
        if (k == agent) continue;
        bool holder_of_same = k < N && s.attach[k] && s.attach[k]->object == object;
        ok = gap(me, bodies[k]) >= (holder_of_same ? 0.0 : 0.01);
      }
      if (!ok) continue;
      s.q[agent] = model.configuration_for_center(c);
      s.qd[agent].setZero();
      std::ostringstream d;
      d << sc_.agents[agent].name << " releases " << sc_.objects[object].name << " and steps back to ("
        << std::setprecision(6) << c(0) << ", " << c(1) << ")";
      log.events.push_back({s.t, "release", d.str()});
      return;
    }
  }
  throw SimAbort("release", "no collision-free retreat for agent " + sc_.agents[agent].name);
}

std::vector<Eigen::Vector3d> Simulator::goal_centers(const SimState& s, const std::vector<Mover>& movers) const {
  const int N = static_cast<int>(s.q.size());
  std::vector<char> moving(N + s.pose.size(), 0);
  for (const auto& m : movers) {
    if (m.team) {
      moving[N + m.object] = 1;
      for (int a : m.members) moving[a] = 1;
    } else {
      moving[m.agent] = 1;
    }
  }
  auto all = spheres(s);
  std::vector<BoundingSphere> statics;
  for (std::size_t k = 0; k < all.size(); ++k)
    if (!moving[k]) statics.push_back(all[k]);

  std::vector<Eigen::Vector3d> goals(movers.size());
  for (std::size_t k = 0; k < problem_.regions.size(); ++k) {
    std::vector<int> idx;
    std::vector<double> radii;
    for (std::size_t m = 0; m < movers.size(); ++m) {
      if (movers[m].target != static_cast<int>(k)) continue;
      idx.push_back(static_cast<int>(m));
      radii.push_back(movers[m].team ? sc_.team_radius : models_[movers[m].agent]->bounding_radius());
    }
    if (idx.empty()) continue;
    const Region& reg = problem_.regions[k];
    double best = -std::numeric_limits<double>::infinity();
    std::vector<Eigen::Vector3d> chosen;
    for (int hk = 0; hk < kHeadings; ++hk) {
      auto pr = pack_spheres(reg, radii, 2.0 * std::numbers::pi * hk / kHeadings);
      if (!pr.fits) break;
      double score = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < radii.size(); ++a)
        for (const auto& st : statics) score = std::min(score, gap({pr.placements[a], radii[a]}, st));
      if (score > best) {
        best = score;
        chosen = pr.placements;
      }
    }
    if (chosen.empty() || best <= 0.0) {
      // greedy polar grid, widest clearance first
      chosen.clear();
      std::vector<BoundingSphere> placed = statics;
      for (double r : radii) {
        double top = -std::numeric_limits<double>::infinity();
        Eigen::Vector3d pick = reg.center;
        for (double rho = 0.0; rho <= reg.radius - r - 2.0 * sc_.sim.region_slack + 1e-12; rho += 0.05)
          for (int hk = 0; hk < kHeadings; ++hk) {
            double a = 2.0 * std::numbers::pi * hk / kHeadings;
            Eigen::Vector3d c = reg.center + rho * Eigen::Vector3d(std::cos(a), std::sin(a), 0.0);
            double sc = std::numeric_limits<double>::infinity();
            for (const auto& st : placed) sc = std::min(sc, gap({c, r}, st));
            if (sc > top) {
              top = sc;
              pick = c;
            }
            if (rho == 0.0) break;
          }
        if (top <= 0.0) throw SimAbort("placement", "no free goal slot in region pi" + std::to_string(reg.id));
        chosen.push_back(pick);
        placed.push_back({pick, r});
      }
    }
    for (std::size_t a = 0; a < idx.size(); ++a) goals[idx[a]] = chosen[a];
  }
  return goals;
}

Simulator::Episode Simulator::build_episode(const SimState& s, const std::vector<Action>& actions) const {
  Episode ep;
  std::vector<int> from;
  for (const auto& a : actions) {
    if (a.kind == Action::Kind::Move) {
      Mover m;
      m.agent = a.agents.at(0);
      m.target = a.to;
      ep.movers.push_back(m);
      from.push_back(a.from);
    } else if (a.kind == Action::Kind::Transport) {
      Mover m;
      m.team = true;
      m.object = a.object;
      m.members = a.agents;
      m.target = a.to;
      for (int ag : a.agents)
        if (!s.attach[ag] || s.attach[ag]->object != a.object)
          throw SimAbort("mismatch", "transporting agent does not hold the object");
      ep.movers.push_back(m);
      from.push_back(a.from);
    }
  }
  if (ep.movers.empty()) return ep;
  auto goals = goal_centers(s, ep.movers);
  NavScenario& ns = ep.nav;
  ns.regions = problem_.regions;
  ns.r0 = sc_.r0;
  ns.params = sc_.nav;
  const int N = static_cast<int>(s.q.size());
  std::vector<char> moving(N + s.pose.size(), 0);
  for (std::size_t m = 0; m < ep.movers.size(); ++m) {
    const auto& mv = ep.movers[m];
    std::vector<int> forbidden;
    for (int k = 0; k < static_cast<int>(problem_.regions.size()); ++k)
      if (k != from[m] && k != mv.target) forbidden.push_back(k);
    if (mv.team) {
      ns.params.kappa = sc_.kappa_transport;
      NavTeam t;
      t.goal = goals[m];
      t.goal(2) = s.pose[mv.object](2);
      t.radius = sc_.team_radius;
      t.offset = Eigen::Vector3d(0.0, 0.0, -s.pose[mv.object](2));
      t.forbidden = forbidden;
      ep.nav_agent_index.push_back(static_cast<int>(ns.teams.size()));
      ns.teams.push_back(t);
      moving[N + mv.object] = 1;
      for (int a : mv.members) moving[a] = 1;
    } else {
      NavAgent a;
      a.model = models_[mv.agent].get();
      a.goal = models_[mv.agent]->configuration_for_center(goals[m]);
      a.forbidden = forbidden;
      ep.nav_agent_index.push_back(static_cast<int>(ns.agents.size()));
      ns.agents.push_back(a);
      moving[mv.agent] = 1;
    }
  }
  auto all = spheres(s);
  for (std::size_t k = 0; k < all.size(); ++k)
    if (!moving[k]) ns.statics.push_back(all[k]);
  return ep;
}

NavState Simulator::nav_state(const SimState& s) const {
  NavState x;
  for (const auto& m : ep_.movers) {
    if (m.team)
      x.p.push_back(s.pose[m.object].head<3>());
    else
      x.q.push_back(s.q[m.agent]);
  }
  return x;
}

CoupledState Simulator::team_state(const SimState& s, const Mover& m) const {
  CoupledState cs;
  cs.pose = s.pose[m.object];
  cs.v = s.v[m.object];
  for (int a : m.members) cs.members.push_back({models_[a].get(), *s.attach[a], s.q[a], s.qd[a]});
  return cs;
}

void Simulator::pack(const SimState& s, Eigen::VectorXd& x) const {
  int n = 0;
  for (const auto& m : ep_.movers) n += m.team ? 6 : 8;
  x.resize(n);
  int o = 0;
  for (const auto& m : ep_.movers) {
    if (m.team) {
      const auto& p = s.pose[m.object];
      const auto& v = s.v[m.object];
      x.segment<6>(o) << p(0), p(1), p(5), v(0), v(1), v(5);
      o += 6;
    } else {
      x.segment<4>(o) = s.q[m.agent];
      x.segment<4>(o + 4) = s.qd[m.agent];
      o += 8;
    }
  }
}

void Simulator::unpack(SimState& s, const Eigen::VectorXd& x) const {
  int o = 0;
  for (const auto& m : ep_.movers) {
    if (m.team) {
      auto& p = s.pose[m.object];
      auto& v = s.v[m.object];
      p(0) = x(o);
      p(1) = x(o + 1);
      p(5) = x(o + 2);
      v(0) = x(o + 3);
      v(1) = x(o + 4);
      v(5) = x(o + 5);
      for (int a : m.members) {
        s.q[a] = models_[a]->attached_configuration(*s.attach[a], p);
        s.qd[a] = models_[a]->attached_velocity(*s.attach[a], p, v);
      }
      o += 6;
    } else {
      s.q[m.agent] = x.segment<4>(o);
      s.qd[m.agent] = x.segment<4>(o + 4);
      o += 8;
    }
  }
}

Eigen::VectorXd Simulator::derivative(const SimState& s) const {
  NavEvaluation ev;
  try {
    ev = navfn_gradient(ep_.nav, nav_state(s));
  } catch (const std::domain_error&) {
    throw SimAbort("collision", "state reached the obstacle set");
  }
  const auto P = planar_selection();
  Eigen::VectorXd dx;
  pack(s, dx);
  int o = 0;
  for (std::size_t k = 0; k < ep_.movers.size(); ++k) {
    const auto& m = ep_.movers[k];
    const int slot = ep_.nav_agent_index[k];
    if (m.team) {
      CoupledState cs = team_state(s, m);
      Vector6d grad = Vector6d::Zero();
      grad.head<3>() = ev.team_gradient[slot];
      std::vector<double> c(m.members.size(), 1.0 / static_cast<double>(m.members.size()));
      Eigen::VectorXd u = team_control(cs, objects_[m.object], grad, c);
      CoupledTerms t = coupled_terms(cs, objects_[m.object]);
      Vector6d rhs = grasp_matrix(cs).transpose() * u - t.C * cs.v - t.g;
      Eigen::Matrix3d Mp = P.transpose() * t.M * P;
      Eigen::Vector3d acc = Mp.llt().solve(P.transpose() * rhs);
      dx.segment<3>(o) << cs.v(0), cs.v(1), cs.v(5);
      dx.segment<3>(o + 3) = acc;
      o += 6;
    } else {
      const auto& model = *models_[m.agent];
      Eigen::VectorXd u = transition_control(model, s.q[m.agent], s.qd[m.agent], ev.agent_gradient[slot], sc_.K);
      dx.segment<4>(o) = s.qd[m.agent];
      dx.segment<4>(o + 4) = agent_accel(model, s.q[m.agent], s.qd[m.agent], u);
      o += 8;
    }
  }
  return dx;
}

void Simulator::integrate(SimState& s, double dt) {
  Eigen::VectorXd x0;
  pack(s, x0);
  SimState w = s;
  auto f = [&](const Eigen::VectorXd& x) {
    unpack(w, x);
    return derivative(w);
  };
  Eigen::VectorXd k1 = f(x0);
  Eigen::VectorXd k2 = f(x0 + 0.5 * dt * k1);
  Eigen::VectorXd k3 = f(x0 + 0.5 * dt * k2);
  Eigen::VectorXd k4 = f(x0 + dt * k3);
  Eigen::VectorXd x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  unpack(s, x1);
  for (const auto& m : ep_.movers) {
    if (m.team) {
      s.pose[m.object](5) = wrap_angle(s.pose[m.object](5));
      for (int a : m.members) s.q[a] = models_[a]->attached_configuration(*s.attach[a], s.pose[m.object]);
    }
  }
}

double Simulator::lyapunov_value(const SimState& s, double phi) const {
  const auto P = planar_selection();
  double V = phi;
  for (const auto& m : ep_.movers) {
    if (m.team) {
      CoupledState cs = team_state(s, m);
      Matrix6d M = coupled_terms(cs, objects_[m.object]).M;
      Eigen::Vector3d vp = P.transpose() * cs.v;
      V += 0.5 * vp.dot(P.transpose() * M * P * vp);
    } else {
      V += 0.5 * s.qd[m.agent].dot(models_[m.agent]->inertia(s.q[m.agent]) * s.qd[m.agent]);
    }
  }
  return V;
}

void Simulator::log_row(const SimState& s, TrajectoryLog& log) const {
  if (log.columns.empty()) {
    log.columns.push_back("t");
    for (const auto& a : sc_.agents)
      for (const char* c : {"x", "y", "q1", "q2", "dx", "dy", "dq1", "dq2"}) log.columns.push_back(a.name + "_" + c);
    for (const auto& o : sc_.objects)
      for (const char* c : {"x", "y", "z", "roll", "pitch", "yaw", "vx", "vy", "vz", "wx", "wy", "wz"})
        log.columns.push_back(o.name + "_" + c);
    for (const char* c : {"phi", "gamma", "log10_G", "min_beta", "clearance", "V", "step"}) log.columns.push_back(c);
  }
  std::vector<double> r{s.t};
  for (std::size_t i = 0; i < s.q.size(); ++i) {
    for (int k = 0; k < 4; ++k) r.push_back(s.q[i](k));
    for (int k = 0; k < 4; ++k) r.push_back(s.qd[i](k));
  }
  for (std::size_t j = 0; j < s.pose.size(); ++j) {
    for (int k = 0; k < 6; ++k) r.push_back(s.pose[j](k));
    for (int k = 0; k < 6; ++k) r.push_back(s.v[j](k));
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (ep_.movers.empty()) {
    for (int k = 0; k < 4; ++k) r.push_back(nan);
    r.push_back(clearance(s));
    r.push_back(nan);
  } else {
    NavState x = nav_state(s);
    double phi = navfn_value(ep_.nav, x);
    auto betas = beta_catalog(ep_.nav, x);
    double mb = std::numeric_limits<double>::infinity();
    for (const auto& b : betas) mb = std::min(mb, b.value);
    double lg = std::log10(std::max(obstacle_G(ep_.nav, x), std::numeric_limits<double>::min()));
    r.push_back(phi);
    r.push_back(goal_gamma(ep_.nav, x));
    r.push_back(lg);
    r.push_back(mb);
    r.push_back(clearance(s));
    r.push_back(lyapunov_value(s, phi));
  }
  r.push_back(s.step);
  if (!log.rows.empty() && !(s.t > log.rows.back()[0])) return;
  log.rows.push_back(std::move(r));
}

StepReport Simulator::execute_step(SimState& s, const std::vector<Action>& actions, TrajectoryLog& log,
                                   StepObserver* observer) {
  StepReport rep;
  rep.t_start = s.t;
  ep_ = Episode{};
  for (const auto& a : actions)
    if (a.kind == Action::Kind::Release) apply_release(s, a.agents.at(0), log);
  for (const auto& a : actions)
    if (a.kind == Action::Kind::Grasp) apply_grasp(s, a.agents.at(0), a.object, log);
  ep_ = build_episode(s, actions);
  rep.movers = static_cast<int>(ep_.movers.size());
  rep.min_clearance = clearance(s);
  if (ep_.movers.empty()) {
    rep.completed = true;
    return rep;
  }
  if (rep.min_clearance < 0.0) throw SimAbort("collision", "bodies overlap at step start");
  {
    std::ostringstream d;
    d << "step " << s.step << ":";
    for (const auto& a : actions)
      if (a.kind == Action::Kind::Move || a.kind == Action::Kind::Transport) d << " " << describe(a, problem_);
    log.events.push_back({s.t, "step_start", d.str()});
  }
  bool any_team = false;
  for (const auto& m : ep_.movers) any_team |= m.team;
  const double horizon = any_team ? sc_.sim.transport_horizon : sc_.sim.nav_horizon;
  const double dt = sc_.sim.dt;
  const long sample_every = std::max(1L, std::lround(sc_.sim.sample_period / dt));
  const long max_steps = std::lround(horizon / dt);

  auto speed = [&](const Mover& m) {
    return m.team ? (planar_selection().transpose() * s.v[m.object]).cwiseAbs().maxCoeff()
                  : s.qd[m.agent].cwiseAbs().maxCoeff();
  };
  auto inside = [&](const Mover& m, bool object_only) {
    const Region& reg = problem_.regions[m.target];
    if (m.team) {
      Eigen::Vector3d p = s.pose[m.object].head<3>();
      if (object_only) return ball_in_region(p, objects_[m.object].radius, reg);
      p(2) = 0.0;
      return ball_in_region(p, sc_.team_radius, reg, sc_.sim.region_slack);
    }
    return ball_in_region(models_[m.agent]->bounding_center(s.q[m.agent]), models_[m.agent]->bounding_radius(), reg,
                          sc_.sim.region_slack);
  };
  auto done = [&]() {
    for (const auto& m : ep_.movers)
      if (!inside(m, false) || speed(m) >= sc_.sim.speed_tol) return false;
    return true;
  };
  auto forbidden_hit = [&]() {
    for (const auto& b : beta_catalog(ep_.nav, nav_state(s)))
      if (b.id.find("-pi") != std::string::npos && b.value < 0.0) return true;
    return false;
  };

  double phi = navfn_value(ep_.nav, nav_state(s));
  try {
    navfn_gradient(ep_.nav, nav_state(s));
  } catch (const std::domain_error&) {
    throw SimAbort("collision", "state starts on the obstacle set");
  }
  double V = lyapunov_value(s, phi);
  rep.V0 = V;
  const double t0 = s.t;
  for (long k = 0;; ++k) {
    if (k % sample_every == 0) log_row(s, log);
    if (done()) break;
    if (k >= max_steps) {
      std::ostringstream d;
      d << "step " << s.step << " did not converge within " << horizon << " s";
      log.events.push_back({s.t, "abort", d.str()});
      throw SimAbort("horizon", d.str());
    }
    if (k % sample_every == 0) {
      auto ev = navfn_gradient(ep_.nav, nav_state(s));
      bool still = true;
      for (const auto& m : ep_.movers) still &= speed(m) < sc_.sim.speed_tol;
      if (ev.gradient.norm() < 1e-9 && ev.gamma > 1e-6 && still) {
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (const auto& m : ep_.movers) {
          if (m.team) {
            s.pose[m.object](0) += 1e-6 * U(rng_);
            s.pose[m.object](1) += 1e-6 * U(rng_);
            for (int a : m.members) s.q[a] = models_[a]->attached_configuration(*s.attach[a], s.pose[m.object]);
          } else {
            for (int j = 0; j < s.q[m.agent].size(); ++j) s.q[m.agent](j) += 1e-6 * U(rng_);
          }
        }
        ++rep.jitters;
        log.events.push_back({s.t, "jitter", "saddle perturbation 1e-6"});
        phi = navfn_value(ep_.nav, nav_state(s));
        V = lyapunov_value(s, phi);
      }
    }
    integrate(s, dt);
    s.t = t0 + static_cast<double>(k + 1) * dt;
    double phi1 = navfn_value(ep_.nav, nav_state(s));
    double V1 = lyapunov_value(s, phi1);
    rep.max_V_increase = std::max(rep.max_V_increase, V1 - V);
    V = V1;
    double c = clearance(s);
    rep.min_clearance = std::min(rep.min_clearance, c);
    if (c < 0.0) {
      log.events.push_back({s.t, "abort", "collision"});
      throw SimAbort("collision", "bodies overlap during step " + std::to_string(s.step));
    }
    if (forbidden_hit()) rep.region_violation = true;
    if (rep.object_entry < 0.0) {
      bool all_in = any_team;
      for (const auto& m : ep_.movers)
        if (m.team) all_in &= inside(m, true);
      if (all_in) rep.object_entry = s.t - t0;
    }
    if (observer) observer->on_step(s, phi1, V1);
  }
  rep.duration = s.t - t0;
  rep.completed = true;
  for (const auto& m : ep_.movers) {
    if (m.team) {
      s.v[m.object].setZero();
      for (int a : m.members) s.qd[a].setZero();
    } else {
      s.qd[m.agent].setZero();
    }
  }
  std::ostringstream d;
  d << "step " << s.step << " done in " << std::setprecision(6) << rep.duration << " s";
  log.events.push_back({s.t, "step_end", d.str()});
  ep_ = Episode{};
  return rep;
}

RunResult run_plan(Simulator& sim, const Plan& plan, const TransitionSystem& ts, int suffix_reps, int max_steps) {
  RunResult out;
  std::vector<int> seq = plan.prefix;
  std::vector<const std::vector<Action>*> acts;
  for (const auto& a : plan.prefix_actions) acts.push_back(&a);
  for (int r = 0; r < suffix_reps; ++r) {
    seq.insert(seq.end(), plan.suffix.begin(), plan.suffix.end());
    for (const auto& a : plan.suffix_actions) acts.push_back(&a);
  }
  if (!plan.suffix.empty()) seq.push_back(plan.suffix.front());
  if (max_steps >= 0 && seq.size() > static_cast<std::size_t>(max_steps) + 1) seq.resize(max_steps + 1);
  SimState s = sim.initial_state();
  try {
    auto d0 = sim.abstract(s);
    if (d0 != ts.states[seq.front()]) throw SimAbort("mismatch", "initial state differs from the plan");
    out.visited.push_back(d0);
    out.word.push_back(ts.labels[seq.front()]);
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
      s.step = static_cast<int>(k);
      out.steps.push_back(sim.execute_step(s, *acts[k], out.log));
      auto d = sim.abstract(s);
      if (d != ts.states[seq[k + 1]])
        throw SimAbort("mismatch", "step " + std::to_string(k) + " landed outside the planned state");
      out.visited.push_back(d);
      out.word.push_back(label_of(d, sim.problem()));
    }
  } catch (const SimAbort& e) {
    out.aborted = true;
    out.abort_reason = e.kind + ": " + e.what();
  }
  return out;
}

// ---------------------------------------------------------------- svg

std::string render_svg(const Scenario& sc, const TrajectoryLog& log) {
  const double R = sc.r0, scale = 10.0, size = 2.0 * R * scale + 20.0;
  auto X = [&](double x) { return (x + R) * scale + 10.0; };
  auto Y = [&](double y) { return (R - y) * scale + 10.0; };
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
  os << "<circle cx=\"" << X(0) << "\" cy=\"" << Y(0) << "\" r=\"" << R * scale
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& r : sc.regions) {
    os << "<circle cx=\"" << X(r.center(0)) << "\" cy=\"" << Y(r.center(1)) << "\" r=\"" << r.radius * scale
       << "\" fill=\"#eef\" stroke=\"#558\"/>\n";
    os << "<text x=\"" << X(r.center(0)) << "\" y=\"" << Y(r.center(1) + r.radius) - 4 << "\" font-size=\"14\""
       << " text-anchor=\"middle\">pi" << r.id << "</text>\n";
  }
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  auto col = [&](const std::string& name) -> int {
    for (std::size_t c = 0; c < log.columns.size(); ++c)
      if (log.columns[c] == name) return static_cast<int>(c);
    return -1;
  };
  auto path = [&](int cx, int cy, const char* color, double width) {
    if (log.rows.empty() || cx < 0 || cy < 0) return;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\" points=\"";
    for (const auto& r : log.rows) os << X(r[cx]) << "," << Y(r[cy]) << " ";
    os << "\"/>\n";
  };
  auto models = sc.models();
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    const char* c = colors[i % 6];
    int cx = col(sc.agents[i].name + "_x"), cy = col(sc.agents[i].name + "_y");
    path(cx, cy, c, 1.5);
    Eigen::VectorXd q = sc.agents[i].q0;
    if (!log.rows.empty() && cx >= 0)
      for (int k = 0; k < 4; ++k) q(k) = log.rows.back()[cx + k];
    Eigen::Vector3d b = models[i]->bounding_center(q);
    os << "<circle cx=\"" << X(b(0)) << "\" cy=\"" << Y(b(1)) << "\" r=\"" << models[i]->bounding_radius() * scale
       << "\" fill=\"none\" stroke=\"" << c << "\"/>\n";
    os << "<text x=\"" << X(b(0)) << "\" y=\"" << Y(b(1)) + 4 << "\" font-size=\"12\" text-anchor=\"middle\">"
       << sc.agents[i].name << "</text>\n";
  }
  for (std::size_t j = 0; j < sc.objects.size(); ++j) {
    int cx = col(sc.objects[j].name + "_x"), cy = col(sc.objects[j].name + "_y");
    path(cx, cy, "#444", 1.0);
    Eigen::Vector3d p = sc.objects[j].pose.head<3>();
    if (!log.rows.empty() && cx >= 0) p = Eigen::Vector3d(log.rows.back()[cx], log.rows.back()[cy], 0.0);
    os << "<circle cx=\"" << X(p(0)) << "\" cy=\"" << Y(p(1)) << "\" r=\"" << sc.objects[j].radius * scale
       << "\" fill=\"#999\" stroke=\"#333\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace coplan
