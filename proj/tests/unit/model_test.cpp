#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "crossflow/dynamics.hpp"
#include "crossflow/intersection_model.hpp"

using namespace crossflow;

namespace {

SceneAgent agent(int id, Lane lane, double pos, double vel, int ordinal) {
  SceneAgent a;
  a.id = id;
  a.lane = lane;
  a.state = {pos, vel};
  a.entry_ordinal = ordinal;
  return a;
}

SimConfig small_config(int horizon) {
  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.radius = 60.0;
  return cfg;
}

// A two-lane conflict: both lanes arrive at the center at about the same time.
SceneSnapshot conflict_scene() {
  SceneSnapshot s;
  s.agents.push_back(agent(1, Lane::west_east, -20.0, 14.0, 0));
  s.agents.push_back(agent(2, Lane::west_east, -27.0, 15.0, 1));
  s.agents.push_back(agent(3, Lane::north_south, -21.0, 15.0, 0));
  s.agents.push_back(agent(4, Lane::north_south, -35.0, 12.0, 1));
  return s;
}

SceneSnapshot mirrored(const SceneSnapshot& s) {
  SceneSnapshot out = s;
  for (auto& a : out.agents) a.lane = a.lane == Lane::west_east ? Lane::north_south : Lane::west_east;
  return out;
}

double solve_objective(const SceneSnapshot& scene, const SimConfig& cfg) {
  const BuiltModel m = build_model(scene, cfg);
  const auto sol = milp::solve_milp(m.problem);
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  return sol.objective;
}

// Direct recomputation of the safety conditions from an extracted plan.
void check_plan_safety(const HorizonPlan& plan, const SceneSnapshot& scene, const BuiltModel& m,
                       const SimConfig& cfg) {
  const int n = cfg.horizon;
  for (const auto& [lead, follow] : m.pairs.same_lane) {
    for (int i = 1; i <= n; ++i) {
      CHECK(plan.agents[lead].states[i].pos - plan.agents[follow].states[i].pos >= cfg.d_safe - 1e-6);
    }
  }
  for (const auto& [p, q] : m.pairs.cross) {
    REQUIRE(scene.agents[p].lane == Lane::west_east);
    REQUIRE(scene.agents[q].lane == Lane::north_south);
    for (int i = 1; i <= n; ++i) {
      const double sep = std::abs(plan.agents[p].states[i].pos) + std::abs(plan.agents[q].states[i].pos);
      CHECK(sep >= cfg.s_dist - 1e-6);
    }
  }
}

}  // namespace

TEST_CASE("variable counts follow the per-agent layout") {
  const SimConfig cfg = small_config(60);
  SUBCASE("single agent") {
    SceneSnapshot s;
    s.agents.push_back(agent(1, Lane::west_east, -50.0, 15.0, 0));
    const BuiltModel m = build_model(s, cfg);
    CHECK(m.problem.num_variables() == 300);
    CHECK(m.problem.num_binaries() == 0);
  }
  SUBCASE("two agents on one lane") {
    SceneSnapshot s;
    s.agents.push_back(agent(1, Lane::west_east, -20.0, 15.0, 0));
    s.agents.push_back(agent(2, Lane::west_east, -40.0, 15.0, 1));
    const BuiltModel m = build_model(s, cfg);
    CHECK(m.problem.num_variables() == 600);
    CHECK(m.problem.num_binaries() == 0);
    CHECK(m.pairs.same_lane.size() == 1);
  }
  SUBCASE("one agent per lane before the center") {
    SceneSnapshot s;
    s.agents.push_back(agent(1, Lane::west_east, -20.0, 15.0, 0));
    s.agents.push_back(agent(2, Lane::north_south, -30.0, 15.0, 0));
    const BuiltModel m = build_model(s, cfg);
    CHECK(m.problem.num_variables() == 600 + 120);
    CHECK(m.problem.num_binaries() == 120);
    CHECK(m.pairs.cross.size() == 1);
  }
}

TEST_CASE("index map is a bijection onto the variables") {
  const SimConfig cfg = small_config(12);
  const SceneSnapshot scene = conflict_scene();
  const BuiltModel m = build_model(scene, cfg);
  std::set<int> seen;
  const int n = cfg.horizon;
  for (int a = 0; a < m.map.num_agents(); ++a) {
    for (int i = 1; i <= n; ++i) {
      for (int c = 0; c < 2; ++c) {
        CHECK(seen.insert(m.map.state(a, i, c)).second);
        CHECK(seen.insert(m.map.slack(a, i, c)).second);
        CHECK(m.map.index(a, VarKind::state, i, c) == m.map.state(a, i, c));
        CHECK(m.map.index(a, VarKind::slack, i, c) == m.map.slack(a, i, c));
      }
      const int z = m.map.sign_binary(a, i);
      if (z >= 0) {
        CHECK(seen.insert(z).second);
        CHECK(m.problem.variables()[z].integrality == milp::Integrality::binary);
      }
    }
    for (int i = 0; i < n; ++i) {
      CHECK(seen.insert(m.map.control(a, i)).second);
      CHECK(m.map.index(a, VarKind::control, i, 0) == m.map.control(a, i));
    }
  }
  CHECK(static_cast<int>(seen.size()) == m.problem.num_variables());
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == m.problem.num_variables() - 1);
}

TEST_CASE("empty scene and bad bounds are rejected") {
  const SimConfig cfg = small_config(10);
  CHECK_THROWS_AS(build_model(SceneSnapshot{}, cfg), std::invalid_argument);

  SceneSnapshot s;
  s.agents.push_back(agent(1, Lane::west_east, -20.0, 15.0, 0));
  SimConfig bad = cfg;
  bad.u_min = 4.0;
  CHECK_THROWS_AS(build_model(s, bad), std::invalid_argument);
  bad = cfg;
  bad.horizon = 1;
  CHECK_THROWS_AS(build_model(s, bad), std::invalid_argument);
}

TEST_CASE("lone agent at top speed keeps full speed") {
  const SimConfig cfg = small_config(20);
  SceneSnapshot s;
  s.agents.push_back(agent(7, Lane::north_south, -50.0, 15.0, 0));
  const BuiltModel m = build_model(s, cfg);
  const auto sol = milp::solve_milp(m.problem);
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  const HorizonPlan plan = extract_plan(sol, m, s);
  REQUIRE(plan.agents.size() == 1);
  CHECK(plan.agents[0].id == 7);
  CHECK(plan.agents[0].controls[0] == doctest::Approx(0.0).epsilon(1e-9));
  // The last state carries no objective weight, so only steps before it are pinned.
  for (int i = 1; i < cfg.horizon; ++i) {
    CHECK(plan.agents[0].states[i].vel == doctest::Approx(15.0));
    CHECK(plan.agents[0].states[i].pos == doctest::Approx(-50.0 + 1.5 * i));
  }
}

TEST_CASE("plans replay through the dynamics and respect every bound") {
  const SimConfig cfg = small_config(15);
  const SceneSnapshot scene = conflict_scene();
  const BuiltModel m = build_model(scene, cfg);
  const auto sol = milp::solve_milp(m.problem);
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  CHECK(milp::check_feasibility(m.problem, sol.values, 1e-6).empty());

  const HorizonPlan plan = extract_plan(sol, m, scene);
  const DynamicsMatrices mats = discretize_double_integrator(cfg.dt);
  REQUIRE(plan.agents.size() == scene.agents.size());
  for (std::size_t a = 0; a < plan.agents.size(); ++a) {
    const AgentPlan& p = plan.agents[a];
    REQUIRE(p.states.size() == static_cast<std::size_t>(cfg.horizon + 1));
    REQUIRE(p.controls.size() == static_cast<std::size_t>(cfg.horizon));
    CHECK(p.states[0].pos == doctest::Approx(scene.agents[a].state.pos).epsilon(1e-9));
    CHECK(p.states[0].vel == doctest::Approx(scene.agents[a].state.vel).epsilon(1e-9));
    for (int i = 0; i < cfg.horizon; ++i) {
      const StateVector next = step(p.states[i], p.controls[i], mats);
      CHECK(std::abs(next.pos - p.states[i + 1].pos) < 1e-6);
      CHECK(std::abs(next.vel - p.states[i + 1].vel) < 1e-6);
      CHECK(p.controls[i] >= cfg.u_min - 1e-9);
      CHECK(p.controls[i] <= cfg.u_max + 1e-9);
      CHECK(p.states[i + 1].vel >= -1e-9);
      CHECK(p.states[i + 1].vel <= cfg.v_max + 1e-9);
    }
  }
  check_plan_safety(plan, scene, m, cfg);
}

TEST_CASE("deviation slacks bound the distance to the terminal target") {
  const SimConfig cfg = small_config(10);
  const SceneSnapshot scene = conflict_scene();
  const BuiltModel m = build_model(scene, cfg);
  const auto sol = milp::solve_milp(m.problem);
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  for (int a = 0; a < m.map.num_agents(); ++a) {
    for (int i = 1; i <= cfg.horizon; ++i) {
      const double pos = sol.values[m.map.state(a, i, 0)];
      const double vel = sol.values[m.map.state(a, i, 1)];
      CHECK(sol.values[m.map.slack(a, i, 0)] >= std::abs(pos - cfg.terminal_position()) - 1e-6);
      CHECK(sol.values[m.map.slack(a, i, 1)] >= std::abs(vel - cfg.v_max) - 1e-6);
    }
  }
}

TEST_CASE("braking leader forces the follower to keep the safe gap") {
  SimConfig cfg = small_config(20);
  SceneSnapshot s;
  s.agents.push_back(agent(1, Lane::west_east, -8.0, 2.0, 0));
  s.agents.push_back(agent(2, Lane::west_east, -30.0, 15.0, 1));
  s.agents.push_back(agent(3, Lane::north_south, -3.0, 15.0, 0));
  const BuiltModel m = build_model(s, cfg);
  const auto sol = milp::solve_milp(m.problem);
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  const HorizonPlan plan = extract_plan(sol, m, s);
  double hardest = 0.0;
  for (double u : plan.agents[1].controls) hardest = std::min(hardest, u);
  CHECK(hardest < -1.0);
  check_plan_safety(plan, s, m, cfg);
}

TEST_CASE("cleared cross pairs are left out of the model") {
  const SimConfig cfg = small_config(10);
  SceneSnapshot s;
  s.agents.push_back(agent(1, Lane::west_east, cfg.s_dist + 1.0, 15.0, 0));
  s.agents.push_back(agent(2, Lane::north_south, cfg.s_dist + 2.0, 15.0, 0));
  const BuiltModel m = build_model(s, cfg);
  CHECK(m.pairs.cross.empty());
  CHECK(m.problem.num_binaries() == 0);
  CHECK_FALSE(cross_pair_active(s.agents[0].state, s.agents[1].state, cfg.s_dist));
  CHECK(cross_pair_active({-1.0, 15.0}, {cfg.s_dist - 1.0, 15.0}, cfg.s_dist));
  CHECK_FALSE(cross_pair_active({-1.0, 15.0}, {cfg.s_dist + 2.0, 15.0}, cfg.s_dist));
}

TEST_CASE("a snapshot already inside the conflict zone is reported infeasible") {
  const SimConfig cfg = small_config(10);
  SceneSnapshot s;
  s.agents.push_back(agent(1, Lane::west_east, 0.0, 15.0, 0));
  s.agents.push_back(agent(2, Lane::north_south, -1.0, 15.0, 0));
  const BuiltModel m = build_model(s, cfg);
  const auto sol = milp::solve_milp(m.problem);
  CHECK(sol.status == milp::SolveStatus::infeasible);
  CHECK_THROWS_AS(extract_plan(sol, m, s), PlanError);
}

TEST_CASE("doubling big M leaves the optimum unchanged") {
  const SimConfig cfg = small_config(15);
  SimConfig doubled = cfg;
  doubled.weights.big_M = 2.0 * cfg.weights.big_M;
  const SceneSnapshot scene = conflict_scene();
  CHECK(std::abs(solve_objective(scene, cfg) - solve_objective(scene, doubled)) < 1e-6);
}

TEST_CASE("a larger separation never improves the optimum") {
  SimConfig narrow = small_config(15);
  narrow.s_dist = 4.0;
  SimConfig wide = narrow;
  wide.s_dist = 6.0;
  const SceneSnapshot scenes[] = {conflict_scene(), mirrored(conflict_scene())};
  for (const auto& scene : scenes) {
    CHECK(solve_objective(scene, wide) <= solve_objective(scene, narrow) + 1e-6);
  }
}

TEST_CASE("swapping the lanes of every agent gives the same optimum") {
  const SimConfig cfg = small_config(15);
  const SceneSnapshot scene = conflict_scene();
  CHECK(std::abs(solve_objective(scene, cfg) - solve_objective(mirrored(scene), cfg)) < 1e-6);
}

TEST_CASE("zero deviation weights maximize speed alone") {
  SimConfig cfg = small_config(10);
  cfg.weights.qo = {0.0, 0.0};
  cfg.weights.po = {0.0, 0.0};
  SceneSnapshot s;
  s.agents.push_back(agent(1, Lane::west_east, -40.0, 10.0, 0));
  const BuiltModel m = build_model(s, cfg);
  const auto sol = milp::solve_milp(m.problem);
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  const HorizonPlan plan = extract_plan(sol, m, s);
  CHECK(plan.agents[0].controls[0] == doctest::Approx(cfg.u_max));
}

TEST_CASE("reachable positions bracket every planned position") {
  const SimConfig cfg = small_config(15);
  const SceneSnapshot scene = conflict_scene();
  const BuiltModel m = build_model(scene, cfg);
  const auto sol = milp::solve_milp(m.problem);
  REQUIRE(sol.status == milp::SolveStatus::optimal);
  const HorizonPlan plan = extract_plan(sol, m, scene);
  for (std::size_t a = 0; a < scene.agents.size(); ++a) {
    const auto [lo, hi] = reachable_positions(scene.agents[a].state, cfg);
    REQUIRE(lo.size() == static_cast<std::size_t>(cfg.horizon + 1));
    for (int i = 0; i <= cfg.horizon; ++i) {
      CHECK(plan.agents[a].states[i].pos >= lo[i] - 1e-6);
      CHECK(plan.agents[a].states[i].pos <= hi[i] + 1e-6);
    }
  }
}
