#pragma once
// Plan files, executed-word files and formula checks against them.

#include <string>
#include <vector>

#include "coplan/ltl.hpp"
#include "coplan/planner.hpp"
#include "coplan/scenario.hpp"

namespace coplan {

/// JSON plan: states by region id, actions by entity name.
std::string plan_to_json(const Plan& plan, const TransitionSystem& ts, const DiscreteProblem& p);

/// Rebuilds a plan against `ts`. Throws ScenarioError when a state or action is unknown.
Plan plan_from_json(const std::string& text, const TransitionSystem& ts, const DiscreteProblem& p);

/// Executed word of a run. The first `prefix_len` letters are the prefix,
/// the remainder repeats a cycle of length `cycle_len`.
struct RunWord {
  int prefix_len = 0;
  int cycle_len = 0;
  std::vector<ltl::Letter> letters;
};

std::string run_word_to_json(const RunWord& w);
RunWord run_word_from_json(const std::string& text);

/// Folds a run word back into a lasso. Throws ScenarioError if the repeated
/// cycles disagree.
ltl::LassoWord fold_run_word(const RunWord& w);

struct CheckResult {
  std::string entity;  // "global" or entity name
  std::string formula;
  bool holds = false;
};

/// Global formula first, then each entity with a nonempty formula.
std::vector<CheckResult> check_word(const Scenario& sc, const ltl::LassoWord& w);

}  // namespace coplan
