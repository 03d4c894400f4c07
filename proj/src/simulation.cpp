#include "crossflow/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "crossflow/intersection_model.hpp"
#include "logging.hpp"
#include "scene_solver.hpp"

namespace crossflow {

Spawner::Spawner(const SimConfig& cfg) : cfg_(cfg), rng_(static_cast<std::mt19937::result_type>(cfg.seed)) {}

std::uint32_t Spawner::draw_k() {
  constexpr std::uint64_t range = 7;
  constexpr std::uint64_t span = std::uint64_t{1} << 32;
  constexpr std::uint64_t limit = span - span % range;
  while (true) {
    const std::uint64_t r = rng_();
    if (r < limit) return static_cast<std::uint32_t>(1 + r % range);
  }
}

std::vector<Agent> Spawner::spawn(int tick, const Agent* last_north_south, const Agent* last_west_east) {
  std::vector<Agent> out;
  const std::pair<Lane, const Agent*> lanes[2] = {{Lane::north_south, last_north_south},
                                                  {Lane::west_east, last_west_east}};
  for (const auto& [lane, last] : lanes) {
    const std::uint32_t k = draw_k();
    const long period = static_cast<long>(k) * cfg_.random_step;
    if (tick % period != 0) continue;
    if (last && last->state.pos - cfg_.lane_start < cfg_.d_safe) continue;
    Agent a;
    a.id = next_id_++;
    a.lane = lane;
    a.spawn_tick = tick;
    a.state = {cfg_.lane_start, cfg_.v_max};
    out.push_back(a);
  }
  return out;
}

Transition region_transition_check(const Agent& agent, const SimConfig& cfg) {
  switch (agent.phase) {
    case Phase::approaching:
      return std::abs(agent.state.pos) <= cfg.radius ? Transition::enter : Transition::none;
    case Phase::in_region:
      return agent.state.pos - agent.entry_pos >= 2.0 * cfg.radius ? Transition::exit : Transition::none;
    case Phase::exited: break;
  }
  return Transition::none;
}

TrajectoryLog run_sim(const SimConfig& cfg) {
  detail::init_logging();
  cfg.validate();
  const auto mats = discretize_double_integrator(cfg.dt);
  Spawner spawner(cfg);
  detail::SceneSolver solver(cfg);

  TrajectoryLog log;
  log.config = cfg;
  std::vector<Agent> live;
  std::map<int, std::size_t> log_index;  // agent id -> position in log.agents
  std::map<Lane, int> last_spawned;      // lane -> agent id
  std::map<Lane, int> entry_counter;

  auto find_live = [&](int id) -> const Agent* {
    for (const auto& a : live) {
      if (a.id == id) return &a;
    }
    return nullptr;
  };

  const int ticks = cfg.total_ticks();
  for (int tick = 0; tick < ticks; ++tick) {
    const double t = tick * cfg.dt;
    const Agent* last_ns = last_spawned.count(Lane::north_south) ? find_live(last_spawned[Lane::north_south]) : nullptr;
    const Agent* last_we = last_spawned.count(Lane::west_east) ? find_live(last_spawned[Lane::west_east]) : nullptr;
    for (Agent& a : spawner.spawn(tick, last_ns, last_we)) {
      last_spawned[a.lane] = a.id;
      log_index[a.id] = log.agents.size();
      AgentLog entry;
      entry.id = a.id;
      entry.lane = a.lane;
      entry.spawn_tick = tick;
      log.agents.push_back(std::move(entry));
      live.push_back(a);
    }

    for (Agent& a : live) {
      if (region_transition_check(a, cfg) == Transition::enter) {
        a.phase = Phase::in_region;
        a.entry_tick = tick;
        a.entry_pos = a.state.pos;
        a.entry_ordinal = entry_counter[a.lane]++;
        log.agents[log_index[a.id]].entry_tick = tick;
      }
    }

    SceneSnapshot scene;
    scene.tick = tick;
    std::vector<Agent*> scene_agents;
    for (Agent& a : live) {
      if (a.phase != Phase::in_region) continue;
      scene.agents.push_back({a.id, a.lane, a.state, a.entry_ordinal});
      scene_agents.push_back(&a);
    }

    TickLog tick_log;
    tick_log.tick = tick;
    tick_log.t = t;
    tick_log.in_region = static_cast<int>(scene.agents.size());
    std::map<int, double> control;
    if (!scene.agents.empty()) {
      const auto start = std::chrono::steady_clock::now();
      detail::SceneSolveStats stats;
      const HorizonPlan plan = solver.solve(scene, stats);
      tick_log.solver_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      tick_log.node_count = stats.nodes;
      for (const auto& ap : plan.agents) control[ap.id] = ap.controls.front();
      spdlog::debug("tick {}: {} agents, {} solves, {} rounds, {} nodes, {:.4f} s", tick, scene.agents.size(),
                    stats.milp_solves, stats.rounds, stats.nodes, tick_log.solver_time);
    }
    log.ticks.push_back(tick_log);

    for (Agent& a : live) {
      const bool in_region = a.phase == Phase::in_region;
      LogSample s;
      s.t = t;
      lane_to_world(a.lane, a.state.pos, s.x, s.y);
      s.v = a.state.vel;
      s.u = in_region ? control.at(a.id) : 0.0;
      s.in_region = in_region;
      log.agents[log_index[a.id]].trajectory.push_back(s);

      if (in_region) {
        a.state = step(a.state, s.u, mats);
        // Round-off can leave the speed a hair outside its box.
        a.state.vel = std::clamp(a.state.vel, 0.0, cfg.v_max);
        if (region_transition_check(a, cfg) == Transition::exit) {
          a.phase = Phase::exited;
          a.exit_tick = tick + 1;
          log.agents[log_index[a.id]].exit_tick = tick + 1;
        }
      } else {
        a.state.pos = kinematic_advance(a.state.pos, cfg.v_max, cfg.dt);
        a.state.vel = cfg.v_max;
      }
    }
    std::erase_if(live, [&](const Agent& a) { return a.state.pos > cfg.lane_end; });
  }
  spdlog::info("run finished: radius {} s_dist {} seed {}: {} agents spawned", cfg.radius, cfg.s_dist, cfg.seed,
               spawner.spawned());
  return log;
}

}  // namespace crossflow
