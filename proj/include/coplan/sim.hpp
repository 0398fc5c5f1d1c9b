#pragma once
// Hybrid execution of discrete plan steps under the continuous controllers.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "coplan/control.hpp"
#include "coplan/dynamics.hpp"
#include "coplan/navfn.hpp"
#include "coplan/planner.hpp"
#include "coplan/scenario.hpp"

namespace coplan {

struct SimAbort : std::runtime_error {
  std::string kind;  // horizon, collision, singularity, mismatch
  SimAbort(std::string k, const std::string& what) : std::runtime_error(what), kind(std::move(k)) {}
};

struct SimState {
  double t = 0.0;
  std::vector<Eigen::VectorXd> q, qd;
  std::vector<Vector6d> pose, v;
  std::vector<std::optional<GraspAttachment>> attach;  // per agent
  int step = 0;
};

struct SimEvent {
  double t = 0.0;
  std::string kind;
  std::string detail;
};

struct TrajectoryLog {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<SimEvent> events;

  std::string csv() const;
  std::string events_text() const;
  /// FNV-1a over the exact bytes of rows and events.
  std::uint64_t hash() const;
};

struct StepReport {
  bool completed = false;
  double t_start = 0.0;
  double duration = 0.0;
  double object_entry = -1.0;  // first time all transported objects sit in their target region
  double min_clearance = 0.0;
  double V0 = 0.0;
  double max_V_increase = 0.0;  // largest per-step increase of V
  int jitters = 0;
  bool region_violation = false;
  int movers = 0;
};

/// Hooks called once per accepted integration step.
struct StepObserver {
  virtual ~StepObserver() = default;
  virtual void on_step(const SimState&, double phi, double V) = 0;
};

class Simulator {
 public:
  explicit Simulator(const Scenario& sc);

  const Scenario& scenario() const { return sc_; }
  const DiscreteProblem& problem() const { return problem_; }
  SimState initial_state() const;

  /// Regions occupied by the bodies; -1 where a body fits no region.
  DiscreteState abstract(const SimState& s) const;
  std::vector<BoundingSphere> spheres(const SimState& s, std::vector<std::pair<int, int>>* exempt = nullptr) const;
  double clearance(const SimState& s) const;

  StepReport execute_step(SimState& s, const std::vector<Action>& actions, TrajectoryLog& log,
                          StepObserver* observer = nullptr);

  /// One RK4 step of the free-agent and team dynamics of the current step.
  void integrate(SimState& s, double dt);

 private:
  struct Mover {
    bool team = false;
    int agent = -1;
    int object = -1;
    std::vector<int> members;
    int target = -1;
  };
  struct Episode {
    std::vector<Mover> movers;
    NavScenario nav;
    std::vector<int> nav_agent_index;  // mover -> slot in nav.agents / nav.teams
  };

  void apply_grasp(SimState& s, int agent, int object, TrajectoryLog& log);
  void apply_release(SimState& s, int agent, TrajectoryLog& log);
  Episode build_episode(const SimState& s, const std::vector<Action>& actions) const;
  std::vector<Eigen::Vector3d> goal_centers(const SimState& s, const std::vector<Mover>& movers) const;
  NavState nav_state(const SimState& s) const;
  CoupledState team_state(const SimState& s, const Mover& m) const;
  double lyapunov_value(const SimState& s, double phi) const;
  void log_row(const SimState& s, TrajectoryLog& log) const;
  Eigen::VectorXd derivative(const SimState& s) const;
  void pack(const SimState& s, Eigen::VectorXd& x) const;
  void unpack(SimState& s, const Eigen::VectorXd& x) const;

  Scenario sc_;
  DiscreteProblem problem_;
  std::vector<std::shared_ptr<const AgentModel>> models_;
  std::vector<ObjectModel> objects_;
  Episode ep_;
  std::mt19937_64 rng_;
};

struct RunResult {
  TrajectoryLog log;
  std::vector<StepReport> steps;
  std::vector<DiscreteState> visited;  // realized discrete states, one per plan position
  std::vector<ltl::Letter> word;
  bool aborted = false;
  std::string abort_reason;
};

/// Runs the prefix once and the suffix `suffix_reps` times, then returns to
/// the first suffix state. `max_steps` >= 0 stops early.
RunResult run_plan(Simulator& sim, const Plan& plan, const TransitionSystem& ts, int suffix_reps,
                   int max_steps = -1);

/// Top-down view of regions, bodies at the end of the log and their paths.
std::string render_svg(const Scenario& sc, const TrajectoryLog& log);

}  // namespace coplan
