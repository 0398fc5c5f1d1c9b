#pragma once
// Discrete layer: coupled transition system, product with a Buchi automaton,
// minimal-cost lasso search and per-entity projection.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coplan/geometry.hpp"
#include "coplan/ltl.hpp"

namespace coplan {

struct DiscreteState {
  std::vector<int> agent_region;   // index into regions
  std::vector<int> object_region;
  std::vector<int> holds;          // object index, or -1 when free
  auto operator<=>(const DiscreteState&) const = default;
};

struct Action {
  enum class Kind { Idle, Move, Grasp, Release, Transport };
  Kind kind = Kind::Idle;
  std::vector<int> agents;
  int object = -1;
  int from = -1;
  int to = -1;
  bool operator==(const Action&) const = default;
};

struct DiscreteProblem {
  std::vector<Region> regions;
  std::vector<std::string> agent_names;
  std::vector<std::string> object_names;
  std::vector<double> agent_radius;
  std::vector<double> object_radius;
  std::vector<int> capability;
  std::vector<int> threshold;
  double team_radius = 2.75;
  DiscreteState initial;
  int max_movers = -1;  // cap on simultaneously navigating agents, -1 for none
};

struct Successor {
  DiscreteState state;
  std::vector<Action> actions;  // non-idle actions only
  double cost = 0.0;
};

/// Fit and co-location check. Teams listed in `transported` (object ids) count
/// as one sphere of the team radius in their region.
bool state_valid(const DiscreteState& s, const DiscreteProblem& p, const std::vector<int>& transported = {});

std::vector<Successor> successors(const DiscreteState& s, const DiscreteProblem& p);

double transition_cost(const DiscreteState& a, const DiscreteState& b, const DiscreteProblem& p);

std::string atom_name(const std::string& entity, const Region& r);
ltl::Letter label_of(const DiscreteState& s, const DiscreteProblem& p);

struct TsEdge {
  int to = 0;
  double cost = 0.0;
  int action_set = 0;
};

struct TransitionSystem {
  std::vector<DiscreteState> states;  // states[0] is initial
  std::vector<std::vector<TsEdge>> out;
  std::vector<std::vector<Action>> action_sets;
  std::vector<ltl::Letter> labels;

  std::size_t num_transitions() const;
  int find(const DiscreteState& s) const;  // -1 when absent
};

TransitionSystem build_ts(const DiscreteProblem& p);

/// Product with destination labelling. Nodes are encoded as ts * nba + ba and
/// explored lazily; only the edge compatibility table is stored.
class ProductAutomaton {
 public:
  ProductAutomaton(const TransitionSystem& ts, const ltl::BuchiAutomaton& ba);

  const TransitionSystem& ts() const { return *ts_; }
  const ltl::BuchiAutomaton& ba() const { return *ba_; }
  int num_ba() const { return ba_->num_states; }
  std::int64_t node(int s, int b) const { return static_cast<std::int64_t>(s) * ba_->num_states + b; }
  int ts_of(std::int64_t n) const { return static_cast<int>(n / ba_->num_states); }
  int ba_of(std::int64_t n) const { return static_cast<int>(n % ba_->num_states); }
  bool accepting(std::int64_t n) const { return ba_->accepting[ba_of(n)]; }

  std::vector<std::int64_t> initial_nodes() const;
  /// Calls f(next_node, cost, action_set) for every product edge out of n.
  template <class F>
  void for_each_successor(std::int64_t n, F&& f) const {
    int s = ts_of(n), b = ba_of(n);
    for (const auto& e : ts_->out[s])
      for (int k : ba_out_[b])
        if (allowed_[e.to][k]) f(node(e.to, ba_->transitions[k].to), e.cost, e.action_set);
  }

  /// Reachable part, counted by explicit exploration.
  std::pair<std::size_t, std::size_t> reachable_size() const;

 private:
  const TransitionSystem* ts_;
  const ltl::BuchiAutomaton* ba_;
  std::vector<std::vector<int>> ba_out_;
  std::vector<std::vector<char>> allowed_;  // [ts state][ba edge]
};

struct Plan {
  std::vector<int> prefix;  // TS state ids
  std::vector<int> suffix;  // repeated forever, nonempty
  std::vector<std::vector<Action>> prefix_actions;  // prefix_actions[i] leads out of prefix[i]
  std::vector<std::vector<Action>> suffix_actions;  // suffix_actions[i] leads out of suffix[i]
  double prefix_cost = 0.0;
  double suffix_cost = 0.0;
  double cost() const { return prefix_cost + suffix_cost; }
};

struct Unsatisfiable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Plan search_plan(const ProductAutomaton& product);

ltl::LassoWord plan_word(const Plan& plan, const TransitionSystem& ts);

struct EntityProjection {
  std::string name;
  bool is_object = false;
  std::vector<int> prefix_regions, suffix_regions;
  std::vector<int> prefix_holds, suffix_holds;  // agents only
  ltl::LassoWord word;                           // restricted to the entity's own atoms
};

std::vector<EntityProjection> project_plan(const Plan& plan, const TransitionSystem& ts, const DiscreteProblem& p);

std::string describe(const Action& a, const DiscreteProblem& p);
/// One row per plan state with its outgoing actions.
std::string plan_table(const Plan& plan, const TransitionSystem& ts, const DiscreteProblem& p);

}  // namespace coplan
