#include "coplan/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "coplan/ltl.hpp"

namespace coplan {

using nlohmann::json;

namespace {

Eigen::VectorXd vec(const json& j, int n, const char* what) {
  if (!j.is_array() || (n >= 0 && static_cast<int>(j.size()) != n))
    throw ScenarioError(std::string(what) + ": expected an array of " + std::to_string(n) + " numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json arr(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

int region_of(const Eigen::Vector3d& c, double r, const std::vector<Region>& regions) {
  for (std::size_t k = 0; k < regions.size(); ++k)
    if (ball_in_region(c, r, regions[k])) return static_cast<int>(k);
  return -1;
}

void validate(const Scenario& sc) {
  try {
    validate_world(Workspace{sc.r0}, sc.regions);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  if (sc.agents.empty()) throw ScenarioError("no agents");
  if (sc.K.size() != 4) throw ScenarioError("gains.K needs one entry per joint (4)");
  for (int i = 0; i < 4; ++i)
    if (!(sc.K(i) > 0)) throw ScenarioError("gains.K must be positive");
  if (!(sc.nav.kappa > 0) || !(sc.kappa_transport > 0) || !(sc.nav.lambda > 0) || !(sc.nav.h > 0))
    throw ScenarioError("nav parameters must be positive");
  if (sc.cost_model != "squared_displacement") throw ScenarioError("unknown cost model " + sc.cost_model);
  if (!(sc.sim.dt > 0) || !(sc.sim.sample_period >= sc.sim.dt)) throw ScenarioError("bad integrator settings");
  std::vector<BoundingSphere> bodies;
  auto models = sc.models();
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    if (sc.agents[i].params.capability <= 0) throw ScenarioError("capability must be positive");
    BoundingSphere b{models[i]->bounding_center(sc.agents[i].q0), models[i]->bounding_radius()};
    if (region_of(b.center, b.radius, sc.regions) < 0)
      throw ScenarioError("agent " + sc.agents[i].name + " is not inside any region");
    if (!models[i]->in_valid_set(sc.agents[i].q0)) throw ScenarioError("agent " + sc.agents[i].name + " is singular");
    bodies.push_back(b);
  }
  for (const auto& o : sc.objects) {
    if (o.threshold <= 0 || !(o.mass > 0) || !(o.radius > 0)) throw ScenarioError("bad object " + o.name);
    try {
      euler_rate_jacobian(o.pose);
    } catch (const SingularityError&) {
      throw ScenarioError("object " + o.name + " starts at a pitch singularity");
    }
    if (region_of(o.pose.head<3>(), o.radius, sc.regions) < 0)
      throw ScenarioError("object " + o.name + " is not inside any region");
    bodies.push_back({o.pose.head<3>(), o.radius});
  }
  if (bodies.size() > 1 && min_pairwise_clearance(bodies) < 0)
    throw ScenarioError("initial bodies overlap");
  try {
    ltl::parse_ltl(sc.global_formula());
  } catch (const ltl::ParseError& e) {
    throw ScenarioError(std::string("formula: ") + e.what());
  }
}

}  // namespace

std::vector<std::shared_ptr<const AgentModel>> Scenario::models() const {
  std::vector<std::shared_ptr<const AgentModel>> m;
  for (const auto& a : agents) m.push_back(example_agent_model(a.params));
  return m;
}

std::vector<ObjectModel> Scenario::object_models() const {
  std::vector<ObjectModel> m;
  for (const auto& o : objects) m.push_back(ObjectModel::solid_sphere(o.mass, o.radius));
  return m;
}

std::string Scenario::global_formula() const {
  std::string f;
  auto add = [&](const std::string& g) {
    if (g.empty()) return;
    f += (f.empty() ? "(" : " & (") + g + ")";
  };
  for (const auto& a : agents) add(a.formula);
  for (const auto& o : objects) add(o.formula);
  return f.empty() ? "true" : f;
}

DiscreteProblem Scenario::discrete() const {
  DiscreteProblem p;
  p.regions = regions;
  p.team_radius = team_radius;
  p.max_movers = max_movers;
  auto ms = models();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    p.agent_names.push_back(agents[i].name);
    p.agent_radius.push_back(ms[i]->bounding_radius());
    p.capability.push_back(agents[i].params.capability);
    int k = region_of(ms[i]->bounding_center(agents[i].q0), ms[i]->bounding_radius(), regions);
    if (k < 0) throw ScenarioError("agent " + agents[i].name + " is not inside any region");
    p.initial.agent_region.push_back(k);
    p.initial.holds.push_back(-1);
  }
  for (const auto& o : objects) {
    p.object_names.push_back(o.name);
    p.object_radius.push_back(o.radius);
    p.threshold.push_back(o.threshold);
    int k = region_of(o.pose.head<3>(), o.radius, regions);
    if (k < 0) throw ScenarioError("object " + o.name + " is not inside any region");
    p.initial.object_region.push_back(k);
  }
  return p;
}

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  try {
    json j = json::parse(text);
    sc.name = j.value("name", "");
    sc.r0 = j.at("workspace").at("radius_m").get<double>();
    for (const auto& r : j.at("regions")) {
      Region reg;
      reg.id = r.at("id").get<int>();
      reg.center = vec(r.at("center_m"), 3, "region center");
      reg.radius = r.at("radius_m").get<double>();
      sc.regions.push_back(reg);
    }
    for (const auto& a : j.at("agents")) {
      AgentSpec s;
      s.name = a.at("name").get<std::string>();
      s.q0 = vec(a.at("q0_m_rad"), 4, "agent q0");
      s.params.capability = a.at("capability").get<int>();
      if (a.contains("model")) {
        const auto& m = a["model"];
        s.params.base_mass = m.value("base_mass_kg", s.params.base_mass);
        if (m.contains("base_size_m")) s.params.base_size = vec(m["base_size_m"], 3, "base size");
        s.params.link_length = m.value("link_length_m", s.params.link_length);
        s.params.link_mass = m.value("link_mass_kg", s.params.link_mass);
        s.params.radius = m.value("radius_m", s.params.radius);
        if (m.contains("rest_rad")) s.params.rest = vec(m["rest_rad"], 2, "rest posture");
      }
      s.formula = a.value("formula", "");
      sc.agents.push_back(std::move(s));
    }
    for (const auto& o : j.value("objects", json::array())) {
      ObjectSpec s;
      s.name = o.at("name").get<std::string>();
      s.mass = o.at("mass_kg").get<double>();
      s.radius = o.at("radius_m").get<double>();
      s.pose = vec(o.at("pose_m_rad"), 6, "object pose");
      s.threshold = o.at("threshold").get<int>();
      s.formula = o.value("formula", "");
      sc.objects.push_back(std::move(s));
    }
    if (j.contains("nav")) {
      const auto& n = j["nav"];
      sc.nav.kappa = n.value("kappa", sc.nav.kappa);
      sc.nav.lambda = n.value("lambda", sc.nav.lambda);
      sc.nav.h = n.value("h", sc.nav.h);
      sc.kappa_transport = n.value("kappa_transport", sc.nav.kappa);
    } else {
      sc.kappa_transport = sc.nav.kappa;
    }
    sc.K = Eigen::VectorXd::Constant(4, 0.01);
    if (j.contains("gains")) sc.K = vec(j["gains"].at("K"), 4, "gains.K");
    if (j.contains("planner")) {
      const auto& p = j["planner"];
      sc.cost_model = p.value("cost_model", sc.cost_model);
      sc.team_radius = p.value("team_radius_m", sc.team_radius);
      sc.max_movers = p.value("max_movers", sc.max_movers);
    }
    if (j.contains("sim")) {
      const auto& s = j["sim"];
      sc.sim.dt = s.value("dt_s", sc.sim.dt);
      sc.sim.sample_period = s.value("sample_period_s", sc.sim.sample_period);
      sc.sim.nav_horizon = s.value("nav_horizon_s", sc.sim.nav_horizon);
      sc.sim.transport_horizon = s.value("transport_horizon_s", sc.sim.transport_horizon);
      sc.sim.region_slack = s.value("region_slack_m", sc.sim.region_slack);
      sc.sim.speed_tol = s.value("speed_tol", sc.sim.speed_tol);
      sc.sim.suffix_reps = s.value("suffix_reps", sc.sim.suffix_reps);
      sc.sim.seed = s.value("seed", sc.sim.seed);
    }
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  validate(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["workspace"] = {{"radius_m", sc.r0}};
  j["regions"] = json::array();
  for (const auto& r : sc.regions)
    j["regions"].push_back({{"id", r.id}, {"center_m", arr(r.center)}, {"radius_m", r.radius}});
  j["agents"] = json::array();
  for (const auto& a : sc.agents) {
    json m = {{"base_mass_kg", a.params.base_mass},     {"base_size_m", arr(a.params.base_size)},
              {"link_length_m", a.params.link_length}, {"link_mass_kg", a.params.link_mass},
              {"radius_m", a.params.radius},           {"rest_rad", arr(a.params.rest)}};
    j["agents"].push_back({{"name", a.name},
                           {"q0_m_rad", arr(a.q0)},
                           {"capability", a.params.capability},
                           {"model", m},
                           {"formula", a.formula}});
  }
  j["objects"] = json::array();
  for (const auto& o : sc.objects)
    j["objects"].push_back({{"name", o.name},
                            {"mass_kg", o.mass},
                            {"radius_m", o.radius},
                            {"pose_m_rad", arr(o.pose)},
                            {"threshold", o.threshold},
                            {"formula", o.formula}});
  j["nav"] = {{"kappa", sc.nav.kappa}, {"kappa_transport", sc.kappa_transport}, {"lambda", sc.nav.lambda},
              {"h", sc.nav.h}};
  j["gains"] = {{"K", arr(sc.K)}};
  j["planner"] = {{"cost_model", sc.cost_model}, {"team_radius_m", sc.team_radius}, {"max_movers", sc.max_movers}};
  j["sim"] = {{"dt_s", sc.sim.dt},
              {"sample_period_s", sc.sim.sample_period},
              {"nav_horizon_s", sc.sim.nav_horizon},
              {"transport_horizon_s", sc.sim.transport_horizon},
              {"region_slack_m", sc.sim.region_slack},
              {"speed_tol", sc.sim.speed_tol},
              {"suffix_reps", sc.sim.suffix_reps},
              {"seed", sc.sim.seed}};
  return j.dump(2) + "\n";
}

}  // namespace coplan
