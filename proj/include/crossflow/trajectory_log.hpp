#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crossflow/config.hpp"

namespace crossflow {

// One agent at one tick: world position, speed, the control applied during
// the tick, and whether the agent was under centralized control.
struct LogSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double u = 0.0;
  bool in_region = false;
};

struct AgentLog {
  int id = 0;
  Lane lane = Lane::west_east;
  int spawn_tick = 0;
  std::optional<int> entry_tick;
  std::optional<int> exit_tick;
  std::vector<LogSample> trajectory;  // consecutive ticks from spawn_tick
};

struct TickLog {
  int tick = 0;
  double t = 0.0;
  double solver_time = 0.0;  // wall seconds spent building, solving, extracting
  long node_count = 0;
  int in_region = 0;
};

struct TrajectoryLog {
  SimConfig config;
  std::vector<TickLog> ticks;
  std::vector<AgentLog> agents;
};

// Lane-frame position to world coordinates and back. West-east agents run
// along +x; north-south agents run along -y.
void lane_to_world(Lane lane, double pos, double& x, double& y);
double world_to_lane(Lane lane, double x, double y);

inline double lane_position(const AgentLog& agent, const LogSample& s) { return world_to_lane(agent.lane, s.x, s.y); }

// JSON layout: {"config": {...}, "ticks": [...], "agents": [...]} with fixed
// key order and shortest round-trip decimal numbers. Missing entry/exit ticks
// are null.
void write_log_json(const TrajectoryLog& log, std::ostream& out);
std::string log_to_json(const TrajectoryLog& log);
// Throws std::runtime_error on malformed input.
TrajectoryLog read_log_json(std::istream& in);
TrajectoryLog read_log_json_file(const std::string& path);
void write_log_json_file(const TrajectoryLog& log, const std::string& path);

}  // namespace crossflow
