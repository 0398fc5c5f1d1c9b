#include "coplan/planner.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace coplan {

namespace {

struct StateHash {
  std::size_t operator()(const DiscreteState& s) const {
    std::size_t h = 1469598103934665603ull;
    auto mix = [&](int v) { h = (h ^ static_cast<std::size_t>(v + 7)) * 1099511628211ull; };
    for (int v : s.agent_region) mix(v);
    for (int v : s.object_region) mix(v);
    for (int v : s.holds) mix(v);
    return h;
  }
};

}  // namespace

bool state_valid(const DiscreteState& s, const DiscreteProblem& p, const std::vector<int>& transported) {
  const int na = static_cast<int>(s.agent_region.size());
  const int no = static_cast<int>(s.object_region.size());
  std::vector<int> held_by(na, -1);
  for (int i = 0; i < na; ++i) {
    int j = s.holds[i];
    if (j < 0) continue;
    if (s.agent_region[i] != s.object_region[j]) return false;
  }
  auto in_team = [&](int i) {
    int j = s.holds[i];
    return j >= 0 && std::find(transported.begin(), transported.end(), j) != transported.end();
  };
  for (int k = 0; k < static_cast<int>(p.regions.size()); ++k) {
    std::vector<double> radii;
    for (int j : transported)
      if (s.object_region[j] == k) radii.push_back(p.team_radius);
    for (int i = 0; i < na; ++i)
      if (s.agent_region[i] == k && !in_team(i)) radii.push_back(p.agent_radius[i]);
    for (int j = 0; j < no; ++j)
      if (s.object_region[j] == k &&
          std::find(transported.begin(), transported.end(), j) == transported.end())
        radii.push_back(p.object_radius[j]);
    if (!radii.empty() && !pack_spheres(p.regions[k], radii).fits) return false;
  }
  return true;
}

double transition_cost(const DiscreteState& a, const DiscreteState& b, const DiscreteProblem& p) {
  double c = 0.0;
  for (std::size_t i = 0; i < a.agent_region.size(); ++i)
    c += (p.regions[a.agent_region[i]].center - p.regions[b.agent_region[i]].center).squaredNorm();
  for (std::size_t j = 0; j < a.object_region.size(); ++j)
    c += (p.regions[a.object_region[j]].center - p.regions[b.object_region[j]].center).squaredNorm();
  return c;
}

std::vector<Successor> successors(const DiscreteState& s, const DiscreteProblem& p) {
  const int na = static_cast<int>(s.agent_region.size());
  const int no = static_cast<int>(s.object_region.size());
  const int nk = static_cast<int>(p.regions.size());

  std::vector<std::vector<Action>> options(na);
  for (int i = 0; i < na; ++i) {
    auto& o = options[i];
    o.push_back({Action::Kind::Idle, {i}});
    if (s.holds[i] < 0) {
      for (int k = 0; k < nk; ++k)
        if (k != s.agent_region[i]) o.push_back({Action::Kind::Move, {i}, -1, s.agent_region[i], k});
      for (int j = 0; j < no; ++j)
        if (s.object_region[j] == s.agent_region[i]) o.push_back({Action::Kind::Grasp, {i}, j});
    } else {
      o.push_back({Action::Kind::Release, {i}, s.holds[i]});
    }
  }

  std::vector<std::vector<int>> holders(no);
  for (int i = 0; i < na; ++i)
    if (s.holds[i] >= 0) holders[s.holds[i]].push_back(i);

  std::vector<Successor> out;
  std::unordered_map<DiscreteState, std::size_t, StateHash> seen;
  std::vector<std::size_t> pick(na, 0);
  for (;;) {
    int movers = 0;
    for (int i = 0; i < na; ++i) movers += options[i][pick[i]].kind == Action::Kind::Move;
    if (p.max_movers < 0 || movers <= p.max_movers) {
      // teams whose holders all stay attached may be carried somewhere else
      std::vector<int> teams;
      std::vector<std::vector<int>> dests;
      for (int j = 0; j < no; ++j) {
        if (holders[j].empty()) continue;
        bool all_hold = true;
        int power = 0;
        for (int i : holders[j]) {
          all_hold = all_hold && options[i][pick[i]].kind == Action::Kind::Idle;
          power += p.capability[i];
        }
        if (!all_hold || power < p.threshold[j]) continue;
        teams.push_back(j);
        std::vector<int> d{-1};
        for (int k = 0; k < nk; ++k)
          if (k != s.object_region[j]) d.push_back(k);
        dests.push_back(std::move(d));
      }
      std::vector<std::size_t> tp(teams.size(), 0);
      for (;;) {
        DiscreteState ns = s;
        std::vector<Action> acts;
        for (int i = 0; i < na; ++i) {
          const Action& a = options[i][pick[i]];
          switch (a.kind) {
            case Action::Kind::Move: ns.agent_region[i] = a.to; acts.push_back(a); break;
            case Action::Kind::Grasp: ns.holds[i] = a.object; acts.push_back(a); break;
            case Action::Kind::Release: ns.holds[i] = -1; acts.push_back(a); break;
            default: break;
          }
        }
        std::vector<int> carried;
        for (std::size_t t = 0; t < teams.size(); ++t) {
          int k = dests[t][tp[t]];
          if (k < 0) continue;
          int j = teams[t];
          carried.push_back(j);
          acts.push_back({Action::Kind::Transport, holders[j], j, s.object_region[j], k});
          ns.object_region[j] = k;
          for (int i : holders[j]) ns.agent_region[i] = k;
        }
        if (state_valid(ns, p, carried) && !seen.count(ns)) {
          seen.emplace(ns, out.size());
          double c = transition_cost(s, ns, p);
          out.push_back({std::move(ns), std::move(acts), c});
        }
        std::size_t t = 0;
        for (; t < tp.size(); ++t) {
          if (++tp[t] < dests[t].size()) break;
          tp[t] = 0;
        }
        if (t == tp.size()) break;
      }
    }
    int i = 0;
    for (; i < na; ++i) {
      if (++pick[i] < options[i].size()) break;
      pick[i] = 0;
    }
    if (i == na) break;
  }
  return out;
}

std::string atom_name(const std::string& entity, const Region& r) {
  return entity + "-pi" + std::to_string(r.id);
}

ltl::Letter label_of(const DiscreteState& s, const DiscreteProblem& p) {
  ltl::Letter l;
  for (std::size_t i = 0; i < s.agent_region.size(); ++i)
    l.insert(atom_name(p.agent_names[i], p.regions[s.agent_region[i]]));
  for (std::size_t j = 0; j < s.object_region.size(); ++j)
    l.insert(atom_name(p.object_names[j], p.regions[s.object_region[j]]));
  return l;
}

std::size_t TransitionSystem::num_transitions() const {
  std::size_t n = 0;
  for (const auto& o : out) n += o.size();
  return n;
}

int TransitionSystem::find(const DiscreteState& s) const {
  auto it = std::find(states.begin(), states.end(), s);
  return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

TransitionSystem build_ts(const DiscreteProblem& p) {
  if (!state_valid(p.initial, p)) throw std::invalid_argument("initial discrete state violates fit or co-location");
  TransitionSystem ts;
  std::unordered_map<DiscreteState, int, StateHash> index;
  std::map<std::vector<std::tuple<int, std::vector<int>, int, int, int>>, int> action_ids;
  auto intern_actions = [&](const std::vector<Action>& acts) {
    std::vector<std::tuple<int, std::vector<int>, int, int, int>> key;
    for (const auto& a : acts) key.emplace_back(static_cast<int>(a.kind), a.agents, a.object, a.from, a.to);
    auto it = action_ids.find(key);
    if (it != action_ids.end()) return it->second;
    int id = static_cast<int>(ts.action_sets.size());
    ts.action_sets.push_back(acts);
    action_ids.emplace(std::move(key), id);
    return id;
  };
  index.emplace(p.initial, 0);
  ts.states.push_back(p.initial);
  for (std::size_t head = 0; head < ts.states.size(); ++head) {
    auto succ = successors(ts.states[head], p);
    std::vector<TsEdge> edges;
    edges.reserve(succ.size());
    for (auto& sc : succ) {
      auto it = index.find(sc.state);
      int id;
      if (it == index.end()) {
        id = static_cast<int>(ts.states.size());
        index.emplace(sc.state, id);
        ts.states.push_back(sc.state);
      } else {
        id = it->second;
      }
      edges.push_back({id, sc.cost, intern_actions(sc.actions)});
    }
    ts.out.push_back(std::move(edges));
  }
  for (const auto& s : ts.states) ts.labels.push_back(label_of(s, p));
  return ts;
}

ProductAutomaton::ProductAutomaton(const TransitionSystem& ts, const ltl::BuchiAutomaton& ba)
    : ts_(&ts), ba_(&ba), ba_out_(ba.num_states) {
  for (std::size_t k = 0; k < ba.transitions.size(); ++k) ba_out_[ba.transitions[k].from].push_back(static_cast<int>(k));
  allowed_.assign(ts.states.size(), std::vector<char>(ba.transitions.size(), 0));
  for (std::size_t s = 0; s < ts.states.size(); ++s)
    for (std::size_t k = 0; k < ba.transitions.size(); ++k)
      allowed_[s][k] = ltl::label_allows(ba.transitions[k].label, ts.labels[s]);
}

std::vector<std::int64_t> ProductAutomaton::initial_nodes() const {
  std::vector<std::int64_t> out;
  for (int b0 : ba_->initial)
    for (int k : ba_out_[b0])
      if (allowed_[0][k]) out.push_back(node(0, ba_->transitions[k].to));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::pair<std::size_t, std::size_t> ProductAutomaton::reachable_size() const {
  std::unordered_map<std::int64_t, char> seen;
  std::deque<std::int64_t> work;
  for (auto n : initial_nodes()) {
    seen.emplace(n, 1);
    work.push_back(n);
  }
  std::size_t edges = 0;
  while (!work.empty()) {
    auto n = work.front();
    work.pop_front();
    for_each_successor(n, [&](std::int64_t m, double, int) {
      ++edges;
      if (seen.emplace(m, 1).second) work.push_back(m);
    });
  }
  return {seen.size(), edges};
}

namespace {

struct Hop {
  std::int64_t prev = -1;
  int action_set = -1;
  double cost = 0.0;
};

using QItem = std::pair<double, std::int64_t>;

}  // namespace

Plan search_plan(const ProductAutomaton& product) {
  const double inf = std::numeric_limits<double>::infinity();
  // forward Dijkstra from the initial nodes
  std::unordered_map<std::int64_t, double> dist;
  std::unordered_map<std::int64_t, Hop> hop;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
  for (auto n : product.initial_nodes()) {
    dist[n] = 0.0;
    hop[n] = {};
    pq.push({0.0, n});
  }
  std::vector<std::pair<double, std::int64_t>> accepting;
  std::unordered_map<std::int64_t, char> done;
  while (!pq.empty()) {
    auto [d, n] = pq.top();
    pq.pop();
    if (done.count(n)) continue;
    done.emplace(n, 1);
    if (product.accepting(n)) accepting.push_back({d, n});
    product.for_each_successor(n, [&](std::int64_t m, double c, int act) {
      double nd = d + c;
      auto it = dist.find(m);
      if (it == dist.end() || nd < it->second) {
        dist[m] = nd;
        hop[m] = {n, act, c};
        pq.push({nd, m});
      }
    });
  }
  if (accepting.empty()) throw Unsatisfiable("no accepting product state is reachable");
  std::sort(accepting.begin(), accepting.end());

  // The lasso may enter its cycle at any node n, so for each accepting f
  // minimize dist(n) + d(f, n) + d(n, f). dist(f) bounds that from below.
  double best = inf;
  std::vector<std::int64_t> best_pre;       // product nodes init .. n (exclusive of n)
  std::vector<int> best_pre_acts;
  std::vector<double> best_pre_costs;
  std::vector<std::int64_t> best_cycle;     // n .. (back to n, exclusive)
  std::vector<int> best_cycle_acts;
  std::vector<double> best_cycle_costs;
  for (auto [df, f] : accepting) {
    if (df >= best) break;
    // d(f, .) restricted to values that can still improve on the incumbent
    std::unordered_map<std::int64_t, double> da;
    std::unordered_map<std::int64_t, Hop> ha;
    {
      std::priority_queue<QItem, std::vector<QItem>, std::greater<>> q;
      std::unordered_map<std::int64_t, char> fin;
      da[f] = 0.0;
      ha[f] = {};
      q.push({0.0, f});
      while (!q.empty()) {
        auto [d, n] = q.top();
        q.pop();
        if (fin.count(n)) continue;
        fin.emplace(n, 1);
        product.for_each_successor(n, [&](std::int64_t m, double c, int act) {
          double nd = d + c;
          if (nd >= best || m == f) return;
          auto it = da.find(m);
          if (it == da.end() || nd < it->second) {
            da[m] = nd;
            ha[m] = {n, act, c};
            q.push({nd, m});
          }
        });
      }
    }
    // multi-source search back to f, each n seeded with dist(n) + d(f, n)
    struct Label {
      double d;
      std::int64_t origin;
      Hop hop;
    };
    std::unordered_map<std::int64_t, Label> lb;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> q;
    for (const auto& [n, d] : da) {
      auto it = dist.find(n);
      if (it == dist.end()) continue;
      double seed = it->second + d;
      if (seed >= best) continue;
      lb[n] = {seed, n, {}};
      q.push({seed, n});
    }
    double closing = inf;
    std::int64_t closing_prev = -1;
    Hop closing_hop;
    std::unordered_map<std::int64_t, char> fin;
    while (!q.empty()) {
      auto [d, n] = q.top();
      q.pop();
      if (d >= closing) break;
      if (fin.count(n)) continue;
      fin.emplace(n, 1);
      product.for_each_successor(n, [&](std::int64_t m, double c, int act) {
        double nd = d + c;
        if (nd >= best || nd >= closing) return;
        if (m == f) {
          closing = nd;
          closing_prev = n;
          closing_hop = {n, act, c};
          return;
        }
        auto it = lb.find(m);
        if (it == lb.end() || nd < it->second.d) {
          lb[m] = {nd, lb.at(n).origin, {n, act, c}};
          q.push({nd, m});
        }
      });
    }
    if (closing_prev < 0 || closing >= best) continue;
    best = closing;
    std::int64_t entry = lb.at(closing_prev).origin;
    // n -> ... -> f along the second search
    std::vector<std::int64_t> to_f_nodes;
    std::vector<int> to_f_acts;
    std::vector<double> to_f_costs;
    {
      to_f_acts.push_back(closing_hop.action_set);
      to_f_costs.push_back(closing_hop.cost);
      std::int64_t cur = closing_prev;
      while (cur != entry) {
        to_f_nodes.push_back(cur);
        const Hop& h = lb.at(cur).hop;
        to_f_acts.push_back(h.action_set);
        to_f_costs.push_back(h.cost);
        cur = h.prev;
      }
      to_f_nodes.push_back(entry);
      std::reverse(to_f_nodes.begin(), to_f_nodes.end());
      std::reverse(to_f_acts.begin(), to_f_acts.end());
      std::reverse(to_f_costs.begin(), to_f_costs.end());
    }
    // f -> ... -> n along the first search
    std::vector<std::int64_t> from_f_nodes;
    std::vector<int> from_f_acts;
    std::vector<double> from_f_costs;
    for (std::int64_t cur = entry; cur != f; cur = ha.at(cur).prev) {
      from_f_nodes.push_back(ha.at(cur).prev);
      from_f_acts.push_back(ha.at(cur).action_set);
      from_f_costs.push_back(ha.at(cur).cost);
    }
    std::reverse(from_f_nodes.begin(), from_f_nodes.end());
    std::reverse(from_f_acts.begin(), from_f_acts.end());
    std::reverse(from_f_costs.begin(), from_f_costs.end());
    best_cycle = to_f_nodes;
    best_cycle.insert(best_cycle.end(), from_f_nodes.begin(), from_f_nodes.end());
    best_cycle_acts = to_f_acts;
    best_cycle_acts.insert(best_cycle_acts.end(), from_f_acts.begin(), from_f_acts.end());
    best_cycle_costs = to_f_costs;
    best_cycle_costs.insert(best_cycle_costs.end(), from_f_costs.begin(), from_f_costs.end());
    best_pre.clear();
    best_pre_acts.clear();
    best_pre_costs.clear();
    for (std::int64_t cur = entry; hop.at(cur).prev >= 0; cur = hop.at(cur).prev) {
      best_pre.push_back(hop.at(cur).prev);
      best_pre_acts.push_back(hop.at(cur).action_set);
      best_pre_costs.push_back(hop.at(cur).cost);
    }
    std::reverse(best_pre.begin(), best_pre.end());
    std::reverse(best_pre_acts.begin(), best_pre_acts.end());
    std::reverse(best_pre_costs.begin(), best_pre_costs.end());
  }
  if (best_cycle.empty()) throw Unsatisfiable("no accepting cycle is reachable");

  const auto& ts = product.ts();
  Plan plan;
  for (std::size_t i = 0; i < best_pre.size(); ++i) {
    plan.prefix.push_back(product.ts_of(best_pre[i]));
    plan.prefix_actions.push_back(ts.action_sets[best_pre_acts[i]]);
    plan.prefix_cost += best_pre_costs[i];
  }
  for (std::size_t i = 0; i < best_cycle.size(); ++i) {
    plan.suffix.push_back(product.ts_of(best_cycle[i]));
    plan.suffix_actions.push_back(ts.action_sets[best_cycle_acts[i]]);
    plan.suffix_cost += best_cycle_costs[i];
  }
  // a cycle that repeats a shorter TS loop denotes the same word
  const std::size_t L = plan.suffix.size();
  for (std::size_t per = 1; per < L; ++per) {
    if (L % per) continue;
    bool rep = true;
    for (std::size_t i = per; i < L && rep; ++i) rep = plan.suffix[i] == plan.suffix[i - per];
    if (!rep) continue;
    plan.suffix.resize(per);
    plan.suffix_actions.resize(per);
    plan.suffix_cost *= static_cast<double>(per) / static_cast<double>(L);
    break;
  }
  return plan;
}

ltl::LassoWord plan_word(const Plan& plan, const TransitionSystem& ts) {
  ltl::LassoWord w;
  for (int s : plan.prefix) w.prefix.push_back(ts.labels[s]);
  for (int s : plan.suffix) w.cycle.push_back(ts.labels[s]);
  return w;
}

std::vector<EntityProjection> project_plan(const Plan& plan, const TransitionSystem& ts, const DiscreteProblem& p) {
  std::vector<EntityProjection> out;
  auto word_for = [&](const std::string& name, bool object, int idx, EntityProjection& e) {
    auto fill = [&](const std::vector<int>& seq, std::vector<int>& regions, std::vector<int>& holds,
                    std::vector<ltl::Letter>& letters) {
      for (int s : seq) {
        const auto& st = ts.states[s];
        int k = object ? st.object_region[idx] : st.agent_region[idx];
        regions.push_back(k);
        if (!object) holds.push_back(st.holds[idx]);
        letters.push_back({atom_name(name, p.regions[k])});
      }
    };
    fill(plan.prefix, e.prefix_regions, e.prefix_holds, e.word.prefix);
    fill(plan.suffix, e.suffix_regions, e.suffix_holds, e.word.cycle);
  };
  for (std::size_t i = 0; i < p.agent_names.size(); ++i) {
    EntityProjection e;
    e.name = p.agent_names[i];
    word_for(e.name, false, static_cast<int>(i), e);
    out.push_back(std::move(e));
  }
  for (std::size_t j = 0; j < p.object_names.size(); ++j) {
    EntityProjection e;
    e.name = p.object_names[j];
    e.is_object = true;
    word_for(e.name, true, static_cast<int>(j), e);
    out.push_back(std::move(e));
  }
  return out;
}

std::string describe(const Action& a, const DiscreteProblem& p) {
  auto rid = [&](int k) { return "pi" + std::to_string(p.regions[k].id); };
  std::ostringstream os;
  switch (a.kind) {
    case Action::Kind::Idle: os << "-"; break;
    case Action::Kind::Move: os << p.agent_names[a.agents[0]] << ": " << rid(a.from) << " -> " << rid(a.to); break;
    case Action::Kind::Grasp: os << p.agent_names[a.agents[0]] << " grasps " << p.object_names[a.object]; break;
    case Action::Kind::Release: os << p.agent_names[a.agents[0]] << " releases " << p.object_names[a.object]; break;
    case Action::Kind::Transport: {
      os << "{";
      for (std::size_t k = 0; k < a.agents.size(); ++k) os << (k ? "," : "") << p.agent_names[a.agents[k]];
      os << "} carry " << p.object_names[a.object] << ": " << rid(a.from) << " -> " << rid(a.to);
      break;
    }
  }
  return os.str();
}

std::string plan_table(const Plan& plan, const TransitionSystem& ts, const DiscreteProblem& p) {
  std::ostringstream os;
  auto state_str = [&](int s) {
    const auto& st = ts.states[s];
    std::ostringstream o;
    o << "agents(";
    for (std::size_t i = 0; i < st.agent_region.size(); ++i) {
      o << (i ? " " : "") << "pi" << p.regions[st.agent_region[i]].id;
      if (st.holds[i] >= 0) o << "+" << p.object_names[st.holds[i]];
    }
    o << ") objects(";
    for (std::size_t j = 0; j < st.object_region.size(); ++j)
      o << (j ? " " : "") << "pi" << p.regions[st.object_region[j]].id;
    o << ")";
    return o.str();
  };
  auto acts_str = [&](const std::vector<Action>& acts) {
    if (acts.empty()) return std::string("idle");
    std::string s;
    for (std::size_t k = 0; k < acts.size(); ++k) s += (k ? "; " : "") + describe(acts[k], p);
    return s;
  };
  int step = 1;
  for (std::size_t i = 0; i < plan.prefix.size(); ++i, ++step)
    os << step << "   " << state_str(plan.prefix[i]) << "   " << acts_str(plan.prefix_actions[i]) << "\n";
  for (std::size_t i = 0; i < plan.suffix.size(); ++i, ++step)
    os << step << " * " << state_str(plan.suffix[i]) << "   " << acts_str(plan.suffix_actions[i]) << "\n";
  os << "cost " << plan.cost() << " (prefix " << plan.prefix_cost << ", suffix " << plan.suffix_cost << ")\n";
  return os.str();
}

}  // namespace coplan
