// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every failed check is listed in --allow-red.
// Failed checks are always printed as FAIL, allowed or not.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "coplan/planio.hpp"
#include "coplan/sim.hpp"
#include "support.hpp"
#include "toys.hpp"

using namespace coplan;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Check {
  std::string id;
  bool ok;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool ok() const {
    for (auto& c : checks)
      if (!c.ok) return false;
    return true;
  }
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t h) {
  char b[20];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

std::string fixture(const std::string& name) { return std::string(COPLAN_FIXTURES) + "/" + name; }

// ---------------------------------------------------------------- 1

// Nesting depth with literals (atoms, constants, negated atoms) at depth 0.
int operator_depth(const ltl::FormulaPtr& f) {
  if (f->op == ltl::Op::Not && f->lhs && f->lhs->op == ltl::Op::Atom) return 0;
  int d = 0;
  if (f->lhs) d = std::max(d, 1 + operator_depth(f->lhs));
  if (f->rhs) d = std::max(d, 1 + operator_depth(f->rhs));
  return d;
}

Criterion ltl_equivalence() {
  Criterion c{1, "LTL translation agrees with the lasso semantics"};
  auto corpus = testsupport::nnf_corpus();
  auto words = testsupport::all_lassos({"a", "b"}, 3, 3);
  long pairs = 0, bad = 0, naive_bad = 0;
  std::string first;
  for (const auto& f : corpus) {
    auto ba = ltl::translate_to_buchi(f);
    for (const auto& w : words) {
      bool a = ltl::accepts_lasso(ba, w), h = ltl::holds_on_lasso(f, w);
      ++pairs;
      if (a != h) {
        if (first.empty()) first = ltl::to_string(f);
        ++bad;
      }
      if (h != testsupport::naive_holds(f, w, 0)) ++naive_bad;
    }
  }
  int maxd = 0;
  for (auto& f : corpus) maxd = std::max(maxd, operator_depth(f));
  c.checks.push_back({"1.corpus", corpus.size() >= 300,
                      std::to_string(corpus.size()) + " formulas, depth <= " + std::to_string(maxd) + ", " +
                          std::to_string(words.size()) + " lassos"});
  c.checks.push_back({"1.agree", bad == 0,
                      std::to_string(pairs - bad) + "/" + std::to_string(pairs) + " agree" +
                          (first.empty() ? "" : ", first mismatch " + first)});
  c.checks.push_back({"1.naive", naive_bad == 0, std::to_string(naive_bad) + " disagreements with the recursive oracle"});
  return c;
}

// ---------------------------------------------------------------- 2-4

struct FixturePlan {
  Scenario sc;
  DiscreteProblem p;
  TransitionSystem ts;
  ltl::BuchiAutomaton ba;
  Plan plan;
  double ts_seconds = 0.0, search_seconds = 0.0;
};

FixturePlan plan_fixture(const std::string& name) {
  FixturePlan fp;
  fp.sc = load_scenario(fixture(name));
  fp.p = fp.sc.discrete();
  auto t0 = std::chrono::steady_clock::now();
  fp.ts = build_ts(fp.p);
  auto t1 = std::chrono::steady_clock::now();
  fp.ba = ltl::translate_to_buchi(ltl::to_nnf(ltl::parse_ltl(fp.sc.global_formula())));
  ProductAutomaton prod(fp.ts, fp.ba);
  fp.plan = search_plan(prod);
  auto t2 = std::chrono::steady_clock::now();
  fp.ts_seconds = std::chrono::duration<double>(t1 - t0).count();
  fp.search_seconds = std::chrono::duration<double>(t2 - t1).count();
  return fp;
}

std::size_t num_transitions(const TransitionSystem& ts) {
  std::size_t n = 0;
  for (auto& o : ts.out) n += o.size();
  return n;
}

Criterion ts_sizes(const std::vector<FixturePlan>& fps, std::string& digest) {
  Criterion c{2, "transition system sizes"};
  const double want[2][2] = {{560, 7680}, {3112, 154960}};
  for (int k = 0; k < 2; ++k) {
    double s = static_cast<double>(fps[k].ts.states.size()), t = static_cast<double>(num_transitions(fps[k].ts));
    bool ok = std::abs(s - want[k][0]) <= 0.1 * want[k][0] && std::abs(t - want[k][1]) <= 0.1 * want[k][1];
    c.checks.push_back({"2." + fps[k].sc.name, ok,
                        fps[k].sc.name + " " + fmt(s, 8) + "/" + fmt(t, 8) + " (target " + fmt(want[k][0], 8) + "/" +
                            fmt(want[k][1], 8) + ", " + fmt(100 * (s / want[k][0] - 1), 3) + "%/" +
                            fmt(100 * (t / want[k][1] - 1), 3) + "%, built in " + fmt(fps[k].ts_seconds, 3) + " s)"});
    digest += fmt(s, 10) + "/" + fmt(t, 10) + ";";
  }
  return c;
}

Criterion plan_soundness(const std::vector<FixturePlan>& fps, std::string& digest) {
  Criterion c{3, "plans satisfy global and per-entity formulas"};
  for (const auto& fp : fps) {
    int failures = 0, checked = 0;
    for (const auto& r : check_word(fp.sc, plan_word(fp.plan, fp.ts))) {
      ++checked;
      failures += !r.holds;
    }
    for (const auto& e : project_plan(fp.plan, fp.ts, fp.p)) {
      std::string f;
      for (auto& a : fp.sc.agents)
        if (!e.is_object && a.name == e.name) f = a.formula;
      for (auto& o : fp.sc.objects)
        if (e.is_object && o.name == e.name) f = o.formula;
      if (f.empty()) continue;
      ++checked;
      failures += !ltl::holds_on_lasso(ltl::parse_ltl(f), e.word);
    }
    c.checks.push_back({"3." + fp.sc.name, failures == 0,
                        fp.sc.name + " cost " + fmt(fp.plan.cost(), 8) + ", " + std::to_string(checked - failures) +
                            "/" + std::to_string(checked) + " formulas hold, search " + fmt(fp.search_seconds, 3) + " s"});
    digest += plan_to_json(fp.plan, fp.ts, fp.p);
  }
  return c;
}

Criterion plan_optimality(std::string& digest) {
  Criterion c{4, "plan cost equals the exhaustive minimum on toys"};
  const int bound = 6;
  auto toys = testsupport::toy_family(30, 2024);
  int equal = 0, unsat = 0, longer = 0, failures = 0;
  for (const auto& t : toys) {
    auto ts = build_ts(t.problem);
    auto f = ltl::parse_ltl(t.formula);
    double brute = testsupport::brute_force_cost(ts, f, bound);
    try {
      auto ba = ltl::translate_to_buchi(ltl::to_nnf(f));
      ProductAutomaton prod(ts, ba);
      auto plan = search_plan(prod);
      bool sound = ltl::holds_on_lasso(f, plan_word(plan, ts));
      if (static_cast<int>(plan.prefix.size() + plan.suffix.size()) <= bound) {
        if (sound && std::abs(plan.cost() - brute) <= 1e-9 * std::max(1.0, brute))
          ++equal;
        else
          ++failures;
      } else {
        ++longer;
        if (!sound || plan.cost() > brute + 1e-9) ++failures;
      }
      digest += fmt(plan.cost(), 12) + ";";
    } catch (const Unsatisfiable&) {
      ++unsat;
      if (brute != std::numeric_limits<double>::infinity()) ++failures;
      digest += "unsat;";
    }
  }
  c.checks.push_back({"4.toys", failures == 0 && equal >= 20,
                      std::to_string(toys.size()) + " toys: " + std::to_string(equal) + " equal, " +
                          std::to_string(longer) + " beyond length " + std::to_string(bound) + ", " +
                          std::to_string(unsat) + " unsatisfiable, " + std::to_string(failures) + " failures"});
  return c;
}

// ---------------------------------------------------------------- 5

GraspAttachment attach(const AgentModel& m, const Vector6d& pose, double orad, double heading) {
  VectorXd qg = m.grasp_configuration(pose.head<3>(), orad, heading);
  GraspAttachment a;
  a.p_offset = m.ee_rotation(qg).transpose() * (m.ee_position(qg) - pose.head<3>());
  a.eta_offset = Vector3d(0, 0, wrap_angle(qg(2) - pose(5)));
  a.q_grasp = qg;
  return a;
}

Criterion coupled_structure() {
  Criterion c{5, "coupled inertia is symmetric, positive definite and dM/dt - 2C is skew"};
  auto model = example_agent_model();
  auto obj = ObjectModel::solid_sphere(0.5, 0.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-20, 20), ang(-kPi, kPi), vel(-2, 2);
  double worst_sym = 0, min_eig = std::numeric_limits<double>::infinity(), worst_skew = 0;
  const int n = 1000;
  for (int it = 0; it < n; ++it) {
    Vector6d pose;
    pose << pos(rng), pos(rng), 0.5, 0, 0, ang(rng);
    int members = 1 + it % 3;
    std::vector<GraspAttachment> att;
    double h0 = ang(rng);
    for (int k = 0; k < members; ++k) att.push_back(attach(*model, pose, 0.5, h0 + 2 * kPi * k / members));
    Vector6d v;
    v << vel(rng), vel(rng), 0, 0, 0, vel(rng);
    auto state_at = [&](const Vector6d& p) {
      CoupledState s;
      s.pose = p;
      s.v = v;
      for (auto& a : att)
        s.members.push_back({model.get(), a, model->attached_configuration(a, p), model->attached_velocity(a, p, v)});
      return s;
    };
    auto s = state_at(pose);
    auto t = coupled_terms(s, obj);
    worst_sym = std::max(worst_sym, (t.M - t.M.transpose()).norm());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Matrix6d>(t.M).eigenvalues().minCoeff());
    // planar motion: yaw rate equals the vertical angular velocity
    Vector6d rate;
    rate << v(0), v(1), 0, 0, 0, v(5);
    const double h = 1e-5;
    Matrix6d Md = (coupled_terms(state_at(pose + h * rate), obj).M - coupled_terms(state_at(pose - h * rate), obj).M) /
                  (2 * h);
    double r = std::abs(v.dot((Md - 2 * t.C) * v));
    double scale = v.squaredNorm() * (Md.norm() + 2 * t.C.norm()) + 1e-300;
    worst_skew = std::max(worst_skew, r / scale);
  }
  c.checks.push_back({"5.sym", worst_sym < 1e-10, "max |M - M^T| " + fmt(worst_sym, 3)});
  c.checks.push_back({"5.pd", min_eig > 0, "min eigenvalue " + fmt(min_eig, 4)});
  c.checks.push_back({"5.skew", worst_skew < 1e-6,
                      "max relative |v^T(dM/dt - 2C)v| " + fmt(worst_skew, 3) + " over " + std::to_string(n) + " states"});
  return c;
}

// ---------------------------------------------------------------- 6

VectorXd joint(double x, double y, double q1, double q2) {
  VectorXd q(4);
  q << x, y, q1, q2;
  return q;
}

struct NavClass {
  std::string name;
  NavScenario sc;
};

std::vector<NavClass> nav_classes(const AgentModel* m) {
  auto base = load_scenario(fixture("case_ii.json"));
  std::vector<NavClass> out;
  const double r = kPi / 4;
  {
    NavClass k{"navigation"};
    k.sc.r0 = base.r0;
    k.sc.regions = base.regions;
    k.sc.params = base.nav;
    k.sc.agents.push_back({m, joint(-14, -14, r, r), {2}});
    k.sc.agents.push_back({m, joint(0.5, 1.5, r, r), {}});
    k.sc.agents.push_back({m, joint(0.5, -1.5, r, r), {}});
    for (auto& o : base.objects) k.sc.statics.push_back({o.pose.head<3>(), o.radius});
    out.push_back(k);
  }
  {
    NavClass k{"transport"};
    k.sc.r0 = base.r0;
    k.sc.regions = base.regions;
    k.sc.params = base.nav;
    k.sc.params.kappa = base.kappa_transport;
    k.sc.agents.push_back({m, joint(-14, -14, r, r), {2}});
    NavTeam t;
    t.goal = Vector3d(20, -10, 0.5);
    t.radius = base.team_radius;
    t.offset = Vector3d(0, 0, -0.5);
    k.sc.teams.push_back(t);
    k.sc.statics.push_back({base.objects[0].pose.head<3>(), base.objects[0].radius});
    out.push_back(k);
  }
  {
    NavClass k{"mixed"};
    k.sc.r0 = base.r0;
    k.sc.regions = base.regions;
    k.sc.params.kappa = 3.0;
    k.sc.agents.push_back({m, joint(-16, 15, r, r), {0, 2}});
    k.sc.agents.push_back({m, joint(-14, -14, -r, r), {}});
    NavTeam t;
    t.goal = Vector3d(20, -10, 0.5);
    t.radius = base.team_radius;
    t.offset = Vector3d(0, 0, -0.5);
    t.forbidden = {1};
    k.sc.teams.push_back(t);
    k.sc.statics.push_back({Vector3d(5, 12, 0.5), 0.5});
    out.push_back(k);
  }
  return out;
}

NavState random_nav_state(const NavScenario& sc, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-26, 26), a(-kPi, kPi), p(-1.4, 1.4);
  NavState x;
  for (std::size_t i = 0; i < sc.agents.size(); ++i) x.q.push_back(joint(u(rng), u(rng), a(rng), p(rng)));
  for (std::size_t t = 0; t < sc.teams.size(); ++t) x.p.push_back(Vector3d(u(rng), u(rng), 0.5));
  return x;
}

NavState goal_state(const NavScenario& sc) {
  NavState x;
  for (auto& a : sc.agents) x.q.push_back(a.goal);
  for (auto& t : sc.teams) x.p.push_back(t.goal);
  return x;
}

Criterion navfn_properties() {
  Criterion c{6, "navigation function range, goal, collision set and gradient"};
  auto model = example_agent_model();
  auto classes = nav_classes(model.get());
  std::mt19937_64 rng(6);
  int samples = 0, out_of_range = 0;
  for (int it = 0; it < 10000; ++it) {
    const auto& k = classes[it % classes.size()].sc;
    double v = navfn_value(k, random_nav_state(k, rng));
    ++samples;
    if (!(v >= 0.0 && v <= 1.0)) ++out_of_range;
  }
  c.checks.push_back({"6.range", out_of_range == 0,
                      std::to_string(samples - out_of_range) + "/" + std::to_string(samples) + " in [0,1]"});

  double worst_goal = 0;
  for (auto& k : classes) worst_goal = std::max(worst_goal, navfn_value(k.sc, goal_state(k.sc)));
  c.checks.push_back({"6.goal", worst_goal == 0.0, "phi(goal) max " + fmt(worst_goal)});

  // collision states: agent-agent, agent-static, team-agent, workspace boundary, forbidden region
  int collisions = 0, ones = 0;
  auto expect_one = [&](const NavScenario& sc, const NavState& x) {
    ++collisions;
    ones += navfn_value(sc, x) == 1.0;
  };
  {
    auto& sc = classes[0].sc;
    auto x = goal_state(sc);
    x.q[2] = x.q[1];
    expect_one(sc, x);
    x = goal_state(sc);
    x.q[0].head<2>() = sc.statics[0].center.head<2>();
    expect_one(sc, x);
    x = goal_state(sc);
    x.q[1](0) = 29.5;
    x.q[1](1) = 0;
    expect_one(sc, x);
    x = goal_state(sc);
    x.q[0].head<2>() = sc.regions[2].center.head<2>();
    expect_one(sc, x);
  }
  {
    auto& sc = classes[2].sc;
    auto x = goal_state(sc);
    x.p[0].head<2>() = x.q[1].head<2>() + Eigen::Vector2d(1.0, 0.0);
    expect_one(sc, x);
    x = goal_state(sc);
    x.p[0].head<2>() = sc.regions[1].center.head<2>() + Eigen::Vector2d(4.0, 0.0);
    x.q[1].head<2>() = Eigen::Vector2d(0, 0);
    expect_one(sc, x);
  }
  c.checks.push_back({"6.collision", ones == collisions,
                      std::to_string(ones) + "/" + std::to_string(collisions) + " constructed collisions give phi = 1"});

  std::string grad_detail;
  bool grad_ok = true;
  for (auto& k : classes) {
    int done = 0, failed = 0;
    double smallest = std::numeric_limits<double>::infinity();
    double worst = 0;
    while (done < 500) {
      auto x = random_nav_state(k.sc, rng);
      if (obstacle_G(k.sc, x) <= 0.0) continue;
      auto e = navfn_gradient(k.sc, x);
      VectorXd z = stack(k.sc, x);
      // phi = (1 - psi)^(1/kappa), psi = G / (gamma^kappa + G)
      const double kap = k.sc.params.kappa;
      auto log_den = [&](const NavState& y) {
        double a = kap * std::log(goal_gamma(k.sc, y)), b = std::log(obstacle_G(k.sc, y));
        return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
      };
      auto psi = [&](const VectorXd& zz) {
        auto y = unstack(k.sc, zz);
        return std::exp(std::log(obstacle_G(k.sc, y)) - log_den(y));
      };
      const double lphi = std::log(goal_gamma(k.sc, x)) - log_den(x) / kap;
      const bool near_one = psi(z) < 0.5;
      const double scale = std::max(e.gradient.norm(), 1e-300);
      smallest = std::min(smallest, e.gradient.norm());
      double err = 0;
      for (int i = 0; i < z.size(); ++i) {
        double h = 1e-6 * std::max(1.0, std::abs(z(i)));
        VectorXd zp = z, zm = z;
        zp(i) += h;
        zm(i) -= h;
        double fd = near_one ? -std::exp(lphi * (1.0 - kap)) / kap * (psi(zp) - psi(zm)) / (2 * h)
                             : (navfn_value(k.sc, unstack(k.sc, zp)) - navfn_value(k.sc, unstack(k.sc, zm))) / (2 * h);
        err = std::max(err, std::abs(fd - e.gradient(i)) / scale);
      }
      worst = std::max(worst, err);
      failed += err > 1e-4;
      ++done;
    }
    grad_ok &= failed == 0;
    grad_detail += k.name + " " + std::to_string(done - failed) + "/" + std::to_string(done) + " (max rel " +
                   fmt(worst, 2) + ", smallest |grad| " + fmt(smallest, 2) + ")  ";
  }
  c.checks.push_back({"6.gradient", grad_ok, grad_detail});
  return c;
}

// ---------------------------------------------------------------- 7

Action mk(Action::Kind kind, std::vector<int> agents, int object = -1, int from = -1, int to = -1) {
  Action a;
  a.kind = kind;
  a.agents = std::move(agents);
  a.object = object;
  a.from = from;
  a.to = to;
  return a;
}

struct ExecutionResult {
  std::vector<StepReport> steps;
  std::vector<DiscreteState> after;
  std::string abort;
  std::uint64_t hash = 0;
  double wall = 0;
};

ExecutionResult run_case_ii_steps() {
  auto sc = load_scenario(fixture("case_ii.json"));
  Simulator sim(sc);
  auto s = sim.initial_state();
  TrajectoryLog log;
  using K = Action::Kind;
  // pi1 pi3 pi4 -> pi2 pi1 pi1, both free agents grasp O2, team carries O2 from pi1 to pi3
  std::vector<std::vector<Action>> steps{
      {mk(K::Move, {0}, -1, 0, 1), mk(K::Move, {1}, -1, 2, 0), mk(K::Move, {2}, -1, 3, 0)},
      {mk(K::Grasp, {1}, 1), mk(K::Grasp, {2}, 1)},
      {mk(K::Transport, {1, 2}, 1, 0, 2)}};
  ExecutionResult r;
  auto t0 = std::chrono::steady_clock::now();
  try {
    for (std::size_t k = 0; k < steps.size(); ++k) {
      s.step = static_cast<int>(k);
      r.steps.push_back(sim.execute_step(s, steps[k], log));
      r.after.push_back(sim.abstract(s));
    }
  } catch (const SimAbort& e) {
    r.abort = e.kind + ": " + e.what();
  }
  r.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.hash = log.hash();
  return r;
}

Criterion continuous_execution(const ExecutionResult& r) {
  Criterion c{7, "case-ii navigation and transport steps"};
  if (!r.abort.empty() || r.steps.size() != 3) {
    c.checks.push_back({"7.run", false, "aborted: " + r.abort});
    return c;
  }
  const auto& a = r.steps[0];
  const auto& t = r.steps[2];
  bool placed = r.after[0].agent_region == std::vector<int>{1, 0, 0};
  c.checks.push_back({"7a", a.completed && placed && a.duration <= 1800.0,
                      "navigation settled in " + fmt(a.duration, 6) + " s (limit 1800)" + (placed ? "" : ", wrong regions")});
  bool delivered = r.after[2].object_region[1] == 2;
  c.checks.push_back({"7b", t.completed && delivered && t.object_entry >= 0 && t.object_entry <= 600.0,
                      "object enters pi3 at " + fmt(t.object_entry, 6) + " s, team settles at " + fmt(t.duration, 6) +
                          " s (limit 600)"});
  double clear = std::numeric_limits<double>::infinity();
  bool monotone = true, violation = false;
  std::string vdetail;
  for (const auto& s : r.steps) {
    if (s.movers == 0) continue;
    clear = std::min(clear, s.min_clearance);
    monotone &= s.max_V_increase <= 1e-6 * s.V0;
    violation |= s.region_violation;
    vdetail += fmt(s.max_V_increase, 3) + "/" + fmt(s.V0, 4) + " ";
  }
  c.checks.push_back({"7.clearance", clear >= 0.0 && !violation,
                      "min clearance " + fmt(clear) + (violation ? ", forbidden region entered" : "")});
  c.checks.push_back({"7.lyapunov", monotone, "max V increase / V0 per moving step: " + vdetail});
  c.checks.push_back({"7.info", true, "wall " + fmt(r.wall, 4) + " s, log hash " + hex(r.hash)});
  return c;
}

// ---------------------------------------------------------------- 8

std::string planning_digest() {
  std::string d;
  std::vector<FixturePlan> fps{plan_fixture("case_i.json"), plan_fixture("case_ii.json")};
  ts_sizes(fps, d);
  plan_soundness(fps, d);
  plan_optimality(d);
  return d;
}

void print(const Criterion& c, const std::set<std::string>& allow) {
  std::cout << "criterion " << c.number << ": " << (c.ok() ? "PASS" : "FAIL") << "  " << c.title << " ["
            << fmt(c.seconds, 3) << " s]\n";
  for (const auto& k : c.checks)
    std::cout << "    " << (k.ok ? "ok  " : (allow.count(k.id) ? "RED " : "FAIL")) << " " << k.id << "  " << k.detail
              << "\n";
  std::cout.flush();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::vector<std::string> allow_red;
  app.add_option("--only", only, "criteria to run");
  app.add_option("--allow-red", allow_red, "check ids whose failure does not fail the exit status");
  CLI11_PARSE(app, argc, argv);
  std::set<int> want(only.begin(), only.end());
  std::set<std::string> allow(allow_red.begin(), allow_red.end());
  auto run = [&](int n) { return want.empty() || want.count(n); };

  std::vector<Criterion> results;
  auto timed = [&](auto&& f) {
    auto t0 = std::chrono::steady_clock::now();
    Criterion c = f();
    c.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print(c, allow);
    results.push_back(c);
  };

  if (run(1)) timed(ltl_equivalence);
  std::string digest1;
  if (run(2) || run(3) || run(4) || run(8)) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<FixturePlan> fps{plan_fixture("case_i.json"), plan_fixture("case_ii.json")};
    double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string d2, d3, d4;
    if (run(2) || run(8)) timed([&] {
        auto c = ts_sizes(fps, d2);
        c.seconds += setup;
        return c;
      });
    if (run(3) || run(8)) timed([&] { return plan_soundness(fps, d3); });
    if (run(4) || run(8)) timed([&] { return plan_optimality(d4); });
    digest1 = d2 + d3 + d4;
  }
  if (run(5)) timed(coupled_structure);
  if (run(6)) timed(navfn_properties);
  ExecutionResult exec1;
  if (run(7) || run(8)) {
    timed([&] {
      exec1 = run_case_ii_steps();
      return continuous_execution(exec1);
    });
  }
  if (run(8)) timed([&] {
      Criterion c{8, "repeated runs are identical"};
      std::string digest2 = planning_digest();
      c.checks.push_back({"8.planning", digest1 == digest2,
                          "planning digest " + hex(fnv(digest1)) + " vs " + hex(fnv(digest2))});
      auto exec2 = run_case_ii_steps();
      bool same = exec1.hash == exec2.hash && exec1.abort == exec2.abort && exec1.steps.size() == exec2.steps.size();
      for (std::size_t k = 0; same && k < exec1.steps.size(); ++k)
        same = exec1.steps[k].duration == exec2.steps[k].duration &&
               exec1.steps[k].min_clearance == exec2.steps[k].min_clearance;
      c.checks.push_back({"8.execution", same, "trajectory hash " + hex(exec1.hash) + " vs " + hex(exec2.hash)});
      return c;
    });

  int blocking = 0;
  for (const auto& c : results)
    for (const auto& k : c.checks)
      if (!k.ok && !allow.count(k.id)) ++blocking;
  std::cout << "summary:";
  for (const auto& c : results) std::cout << " " << c.number << (c.ok() ? "=PASS" : "=FAIL");
  std::cout << "\n";
  return blocking == 0 ? 0 : 1;
}
