#pragma once
// Small planning instances and an exhaustive lasso search used as the
// optimality oracle.

#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "coplan/ltl.hpp"
#include "coplan/planner.hpp"

namespace testsupport {

struct Toy {
  coplan::DiscreteProblem problem;
  std::string formula;
};

/// Deterministic family of toy problems: 1-2 agents, 0-1 objects, 2-3 regions.
inline std::vector<Toy> toy_family(int count, std::uint64_t seed) {
  using namespace coplan;
  std::mt19937_64 rng(seed);
  std::vector<Toy> out;
  const Eigen::Vector3d centers[] = {{0, 0, 0}, {-14, -14, 0}, {20, -10, 0}};
  for (int k = 0; k < count; ++k) {
    Toy t;
    auto& p = t.problem;
    int nr = 2 + k % 2, na = 1 + (k / 2) % 2, no = (k / 4) % 2;
    for (int r = 0; r < nr; ++r) p.regions.push_back({r + 1, centers[r], 3.5});
    for (int i = 0; i < na; ++i) {
      p.agent_names.push_back(std::to_string(i + 1));
      p.agent_radius.push_back(1.25);
      p.capability.push_back(i == 0 ? 2 : 4);
    }
    for (int j = 0; j < no; ++j) {
      p.object_names.push_back("O" + std::to_string(j + 1));
      p.object_radius.push_back(0.5);
      p.threshold.push_back(na == 2 ? 5 : 2);
    }
    p.initial.agent_region.assign(na, 0);
    p.initial.holds.assign(na, -1);
    for (int i = 0; i < na; ++i) p.initial.agent_region[i] = static_cast<int>(rng() % nr);
    p.initial.object_region.assign(no, static_cast<int>(rng() % nr));
    std::vector<std::string> atoms;
    for (auto& a : p.agent_names)
      for (auto& r : p.regions) atoms.push_back(atom_name(a, r));
    for (auto& o : p.object_names)
      for (auto& r : p.regions) atoms.push_back(atom_name(o, r));
    auto pick = [&] { return "\"" + atoms[rng() % atoms.size()] + "\""; };
    const int shapes = 7;
    switch (k % shapes) {
      case 0: t.formula = "F " + pick(); break;
      case 1: t.formula = "G F " + pick() + " & G F " + pick(); break;
      case 2: t.formula = "G !" + pick() + " & F " + pick(); break;
      case 3: t.formula = "F (" + pick() + " & X " + pick() + ")"; break;
      case 4: t.formula = "G (" + pick() + " -> X " + pick() + ") & G F " + pick(); break;
      case 5: t.formula = "(" + pick() + " U " + pick() + ") & F G " + pick(); break;
      case 6: t.formula = "G F " + pick() + " & F G !" + pick(); break;
    }
    out.push_back(std::move(t));
  }
  return out;
}

/// Minimum of prefix cost + cycle cost over all lassos in `ts` whose total
/// length is at most `max_len` and whose word satisfies `f`. Infinity when none.
inline double brute_force_cost(const coplan::TransitionSystem& ts, const coplan::ltl::FormulaPtr& f, int max_len) {
  const double inf = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(ts.states.size());
  std::vector<std::map<int, double>> cheapest(n);
  for (int s = 0; s < n; ++s)
    for (const auto& e : ts.out[s]) {
      auto it = cheapest[s].find(e.to);
      if (it == cheapest[s].end() || e.cost < it->second) cheapest[s][e.to] = e.cost;
    }
  double best = inf;
  std::vector<int> path{0};
  // path[0..P-1] is the prefix, path[P..] the cycle
  std::function<void(double)> dfs = [&](double cost) {
    if (cost >= best) return;
    const int L = static_cast<int>(path.size());
    for (int P = 0; P < L; ++P) {
      auto back = cheapest[path.back()].find(path[P]);
      if (back == cheapest[path.back()].end()) continue;
      double total = cost + back->second;
      if (total >= best) continue;
      coplan::ltl::LassoWord w;
      for (int i = 0; i < P; ++i) w.prefix.push_back(ts.labels[path[i]]);
      for (int i = P; i < L; ++i) w.cycle.push_back(ts.labels[path[i]]);
      if (coplan::ltl::holds_on_lasso(f, w)) best = total;
    }
    if (L >= max_len) return;
    for (auto [to, c] : cheapest[path.back()]) {
      path.push_back(to);
      dfs(cost + c);
      path.pop_back();
    }
  };
  dfs(0.0);
  return best;
}

}  // namespace testsupport
