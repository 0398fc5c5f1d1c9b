// coplan command line: plan, simulate, check, export-svg.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "coplan/ltl.hpp"
#include "coplan/planio.hpp"
#include "coplan/planner.hpp"
#include "coplan/scenario.hpp"
#include "coplan/sim.hpp"

using namespace coplan;

namespace {

enum Exit { kOk = 0, kVerify = 1, kUnsat = 2, kInvalid = 3, kAbort = 4 };

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write " + path);
  out << text;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TrajectoryLog parse_csv(const std::string& text) {
  TrajectoryLog log;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ScenarioError("empty trajectory file");
  std::stringstream hs(line);
  for (std::string c; std::getline(hs, c, ',');) log.columns.push_back(c);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    for (std::string c; std::getline(rs, c, ',');) row.push_back(std::stod(c));
    if (row.size() != log.columns.size()) throw ScenarioError("trajectory row has the wrong width");
    log.rows.push_back(std::move(row));
  }
  return log;
}

int cmd_plan(const std::string& scenario_path, const std::string& out, const std::string& table_out) {
  auto sc = load_scenario(scenario_path);
  auto p = sc.discrete();
  auto t0 = std::chrono::steady_clock::now();
  auto ts = build_ts(p);
  double t_ts = since(t0);
  t0 = std::chrono::steady_clock::now();
  auto ba = ltl::translate_to_buchi(ltl::to_nnf(ltl::parse_ltl(sc.global_formula())));
  double t_ba = since(t0);
  t0 = std::chrono::steady_clock::now();
  ProductAutomaton prod(ts, ba);
  auto [pn, pe] = prod.reachable_size();
  double t_prod = since(t0);
  std::printf("TS      %zu states, %zu transitions (%.2f s)\n", ts.states.size(), ts.num_transitions(), t_ts);
  std::printf("BA      %d states, %zu transitions (%.3f s)\n", ba.num_states, ba.num_transitions(), t_ba);
  std::printf("product %zu states, %zu transitions (%.2f s)\n", pn, pe, t_prod);
  t0 = std::chrono::steady_clock::now();
  Plan plan;
  try {
    plan = search_plan(prod);
  } catch (const Unsatisfiable& e) {
    std::fprintf(stderr, "unsatisfiable: %s\n", e.what());
    return kUnsat;
  }
  std::printf("search  %.2f s\n\n", since(t0));
  auto table = plan_table(plan, ts, p);
  std::printf("%s", table.c_str());
  if (!out.empty()) spit(out, plan_to_json(plan, ts, p));
  if (!table_out.empty()) spit(table_out, table);
  return kOk;
}

struct SimFlags {
  std::string out = "run";
  double dt = 0.0, horizon = 0.0, kappa = 0.0;
  int suffix_reps = -1, max_steps = -1;
  long long seed = -1;
};

int cmd_simulate(const std::string& scenario_path, const std::string& plan_path, const SimFlags& f) {
  auto sc = load_scenario(scenario_path);
  if (f.dt > 0) sc.sim.dt = f.dt;
  if (f.horizon > 0) sc.sim.nav_horizon = sc.sim.transport_horizon = f.horizon;
  if (f.kappa > 0) sc.nav.kappa = f.kappa;
  if (f.suffix_reps >= 0) sc.sim.suffix_reps = f.suffix_reps;
  if (f.seed >= 0) sc.sim.seed = static_cast<std::uint64_t>(f.seed);
  auto p = sc.discrete();
  auto ts = build_ts(p);
  auto plan = plan_from_json(slurp(plan_path), ts, p);
  Simulator sim(sc);
  auto t0 = std::chrono::steady_clock::now();
  auto r = run_plan(sim, plan, ts, sc.sim.suffix_reps, f.max_steps);
  double wall = since(t0);
  spit(f.out + ".csv", r.log.csv());
  spit(f.out + ".events.txt", r.log.events_text());
  spit(f.out + ".svg", render_svg(sc, r.log));
  RunWord w;
  w.prefix_len = static_cast<int>(plan.prefix.size());
  w.cycle_len = static_cast<int>(plan.suffix.size());
  w.letters = r.word;
  spit(f.out + ".word.json", run_word_to_json(w));
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    const auto& s = r.steps[k];
    std::printf("step %zu: %s t0 %.2f duration %.2f clearance %.4f max dV %.3g\n", k,
                s.completed ? "done" : "open", s.t_start, s.duration, s.min_clearance, s.max_V_increase);
  }
  std::printf("simulated %.2f s in %.1f s wall, log hash %016llx\n", r.log.rows.empty() ? 0.0 : r.log.rows.back()[0],
              wall, static_cast<unsigned long long>(r.log.hash()));
  if (r.aborted) {
    std::fprintf(stderr, "abort: %s\n", r.abort_reason.c_str());
    return kAbort;
  }
  return kOk;
}

int cmd_check(const std::string& scenario_path, const std::string& input) {
  auto sc = load_scenario(scenario_path);
  auto text = slurp(input);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("check: ") + e.what());
  }
  ltl::LassoWord w;
  if (j.contains("letters")) {
    w = fold_run_word(run_word_from_json(text));
  } else {
    auto p = sc.discrete();
    auto ts = build_ts(p);
    w = plan_word(plan_from_json(text, ts, p), ts);
  }
  bool ok = true;
  for (const auto& c : check_word(sc, w)) {
    std::printf("%-4s %-8s %s\n", c.holds ? "ok" : "FAIL", c.entity.c_str(), c.formula.c_str());
    ok = ok && c.holds;
  }
  return ok ? kOk : kVerify;
}

int cmd_export_svg(const std::string& scenario_path, const std::string& csv, const std::string& out) {
  auto sc = load_scenario(scenario_path);
  TrajectoryLog log;
  if (!csv.empty()) log = parse_csv(slurp(csv));
  spit(out, render_svg(sc, log));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent transport planning under LTL specifications"};
  app.require_subcommand(1);

  std::string scenario, plan_path, out, table_out, input, csv;
  SimFlags sf;

  auto* plan = app.add_subcommand("plan", "synthesize a plan");
  plan->add_option("scenario", scenario)->required();
  plan->add_option("--out", out, "plan file (JSON)");
  plan->add_option("--table", table_out, "text table");

  auto* simulate = app.add_subcommand("simulate", "execute a plan under the continuous controllers");
  simulate->add_option("scenario", scenario)->required();
  simulate->add_option("plan", plan_path)->required();
  simulate->add_option("--out", sf.out, "output prefix for .csv, .events.txt, .svg, .word.json");
  simulate->add_option("--dt", sf.dt);
  simulate->add_option("--horizon", sf.horizon, "per-step horizon [s]");
  simulate->add_option("--kappa", sf.kappa, "navigation kappa");
  simulate->add_option("--suffix-reps", sf.suffix_reps);
  simulate->add_option("--seed", sf.seed);
  simulate->add_option("--max-steps", sf.max_steps, "stop after this many plan steps");

  auto* check = app.add_subcommand("check", "verify a plan or executed word");
  check->add_option("scenario", scenario)->required();
  check->add_option("input", input, "plan file or .word.json")->required();

  auto* svg = app.add_subcommand("export-svg", "draw a scenario and an optional trajectory");
  svg->add_option("scenario", scenario)->required();
  svg->add_option("csv", csv);
  svg->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*plan) return cmd_plan(scenario, out, table_out);
    if (*simulate) return cmd_simulate(scenario, plan_path, sf);
    if (*check) return cmd_check(scenario, input);
    if (*svg) return cmd_export_svg(scenario, csv, out);
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kInvalid;
  } catch (const ltl::ParseError& e) {
    std::fprintf(stderr, "invalid formula: %s\n", e.what());
    return kInvalid;
  } catch (const SimAbort& e) {
    std::fprintf(stderr, "abort (%s): %s\n", e.kind.c_str(), e.what());
    return kAbort;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kAbort;
  }
  return kOk;
}
