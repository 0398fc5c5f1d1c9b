#include "coplan/planio.hpp"

#include <json.hpp>

namespace coplan {

using nlohmann::json;

namespace {

const char* kind_name(Action::Kind k) {
  switch (k) {
    case Action::Kind::Idle: return "idle";
    case Action::Kind::Move: return "move";
    case Action::Kind::Grasp: return "grasp";
    case Action::Kind::Release: return "release";
    case Action::Kind::Transport: return "transport";
  }
  return "idle";
}

Action::Kind kind_of(const std::string& s) {
  for (auto k : {Action::Kind::Idle, Action::Kind::Move, Action::Kind::Grasp, Action::Kind::Release,
                 Action::Kind::Transport})
    if (s == kind_name(k)) return k;
  throw ScenarioError("plan: unknown action kind '" + s + "'");
}

int index_of(const std::vector<std::string>& names, const std::string& n, const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == n) return static_cast<int>(i);
  throw ScenarioError(std::string("plan: unknown ") + what + " '" + n + "'");
}

int region_index(const DiscreteProblem& p, int id) {
  for (std::size_t k = 0; k < p.regions.size(); ++k)
    if (p.regions[k].id == id) return static_cast<int>(k);
  throw ScenarioError("plan: unknown region " + std::to_string(id));
}

json state_json(const DiscreteState& s, const DiscreteProblem& p) {
  json j;
  j["agents"] = json::array();
  j["holds"] = json::array();
  for (std::size_t i = 0; i < s.agent_region.size(); ++i) {
    j["agents"].push_back(p.regions[s.agent_region[i]].id);
    j["holds"].push_back(s.holds[i] < 0 ? json(nullptr) : json(p.object_names[s.holds[i]]));
  }
  j["objects"] = json::array();
  for (int k : s.object_region) j["objects"].push_back(p.regions[k].id);
  return j;
}

DiscreteState state_from(const json& j, const DiscreteProblem& p) {
  DiscreteState s;
  for (const auto& a : j.at("agents")) s.agent_region.push_back(region_index(p, a.get<int>()));
  for (const auto& o : j.at("objects")) s.object_region.push_back(region_index(p, o.get<int>()));
  for (const auto& h : j.at("holds"))
    s.holds.push_back(h.is_null() ? -1 : index_of(p.object_names, h.get<std::string>(), "object"));
  return s;
}

json action_json(const Action& a, const DiscreteProblem& p) {
  json j;
  j["kind"] = kind_name(a.kind);
  j["agents"] = json::array();
  for (int i : a.agents) j["agents"].push_back(p.agent_names[i]);
  if (a.object >= 0) j["object"] = p.object_names[a.object];
  if (a.from >= 0) j["from"] = p.regions[a.from].id;
  if (a.to >= 0) j["to"] = p.regions[a.to].id;
  return j;
}

Action action_from(const json& j, const DiscreteProblem& p) {
  Action a;
  a.kind = kind_of(j.at("kind").get<std::string>());
  for (const auto& n : j.at("agents")) a.agents.push_back(index_of(p.agent_names, n.get<std::string>(), "agent"));
  if (j.contains("object")) a.object = index_of(p.object_names, j["object"].get<std::string>(), "object");
  if (j.contains("from")) a.from = region_index(p, j["from"].get<int>());
  if (j.contains("to")) a.to = region_index(p, j["to"].get<int>());
  return a;
}

json steps_json(const std::vector<int>& seq, const std::vector<std::vector<Action>>& acts, const TransitionSystem& ts,
                const DiscreteProblem& p) {
  json arr = json::array();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    json step;
    step["state"] = state_json(ts.states[seq[i]], p);
    step["actions"] = json::array();
    for (const auto& a : acts[i]) step["actions"].push_back(action_json(a, p));
    arr.push_back(std::move(step));
  }
  return arr;
}

}  // namespace

std::string plan_to_json(const Plan& plan, const TransitionSystem& ts, const DiscreteProblem& p) {
  json j;
  j["prefix"] = steps_json(plan.prefix, plan.prefix_actions, ts, p);
  j["suffix"] = steps_json(plan.suffix, plan.suffix_actions, ts, p);
  j["cost"] = {{"prefix", plan.prefix_cost}, {"suffix", plan.suffix_cost}};
  return j.dump(2) + "\n";
}

Plan plan_from_json(const std::string& text, const TransitionSystem& ts, const DiscreteProblem& p) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("plan: ") + e.what());
  }
  Plan plan;
  auto read = [&](const char* key, std::vector<int>& seq, std::vector<std::vector<Action>>& acts) {
    for (const auto& step : j.at(key)) {
      int id = ts.find(state_from(step.at("state"), p));
      if (id < 0) throw ScenarioError(std::string("plan: ") + key + " state is not in the transition system");
      seq.push_back(id);
      std::vector<Action> a;
      for (const auto& x : step.at("actions")) a.push_back(action_from(x, p));
      acts.push_back(std::move(a));
    }
  };
  try {
    read("prefix", plan.prefix, plan.prefix_actions);
    read("suffix", plan.suffix, plan.suffix_actions);
    plan.prefix_cost = j.at("cost").at("prefix").get<double>();
    plan.suffix_cost = j.at("cost").at("suffix").get<double>();
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("plan: ") + e.what());
  }
  if (plan.suffix.empty()) throw ScenarioError("plan: empty suffix");
  return plan;
}

std::string run_word_to_json(const RunWord& w) {
  json j;
  j["prefix_len"] = w.prefix_len;
  j["cycle_len"] = w.cycle_len;
  j["letters"] = json::array();
  for (const auto& l : w.letters) j["letters"].push_back(std::vector<std::string>(l.begin(), l.end()));
  return j.dump(2) + "\n";
}

RunWord run_word_from_json(const std::string& text) {
  try {
    auto j = json::parse(text);
    RunWord w;
    w.prefix_len = j.at("prefix_len").get<int>();
    w.cycle_len = j.at("cycle_len").get<int>();
    for (const auto& l : j.at("letters")) {
      auto v = l.get<std::vector<std::string>>();
      w.letters.emplace_back(v.begin(), v.end());
    }
    return w;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("run word: ") + e.what());
  }
}

ltl::LassoWord fold_run_word(const RunWord& w) {
  const int n = static_cast<int>(w.letters.size());
  if (w.prefix_len < 0 || w.cycle_len <= 0 || w.prefix_len + w.cycle_len > n)
    throw ScenarioError("run word: too short to contain one cycle");
  ltl::LassoWord out;
  out.prefix.assign(w.letters.begin(), w.letters.begin() + w.prefix_len);
  out.cycle.assign(w.letters.begin() + w.prefix_len, w.letters.begin() + w.prefix_len + w.cycle_len);
  for (int k = w.prefix_len + w.cycle_len; k < n; ++k)
    if (w.letters[k] != out.cycle[(k - w.prefix_len) % w.cycle_len])
      throw ScenarioError("run word: repetition " + std::to_string((k - w.prefix_len) / w.cycle_len) +
                          " differs from the first cycle");
  return out;
}

std::vector<CheckResult> check_word(const Scenario& sc, const ltl::LassoWord& w) {
  std::vector<CheckResult> out;
  auto eval = [&](const std::string& who, const std::string& f) {
    auto phi = ltl::parse_ltl(f.empty() ? "true" : f);
    out.push_back({who, f.empty() ? "true" : f, ltl::holds_on_lasso(phi, w)});
  };
  eval("global", sc.global_formula());
  for (const auto& a : sc.agents)
    if (!a.formula.empty()) eval(a.name, a.formula);
  for (const auto& o : sc.objects)
    if (!o.formula.empty()) eval(o.name, o.formula);
  return out;
}

}  // namespace coplan
