#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossflow/config.hpp"
#include "crossflow/dynamics.hpp"
#include "crossflow/trajectory_log.hpp"

namespace crossflow {

enum class Phase { approaching, in_region, exited };

struct Agent {
  int id = 0;
  Lane lane = Lane::west_east;
  int spawn_tick = 0;
  Phase phase = Phase::approaching;
  StateVector state;
  std::optional<int> entry_tick;
  std::optional<int> exit_tick;
  double entry_pos = 0.0;
  int entry_ordinal = -1;
};

// Arrival process: every tick, for the north-south lane and then the
// west-east lane, draw k uniformly from 1..7 and spawn at the lane start when
// tick % (k * L) == 0, unless the previous agent on that lane is still within
// d_safe of the start. Draws come from a 32-bit Mersenne twister with
// rejection sampling, so the stream is identical on every platform.
class Spawner {
 public:
  explicit Spawner(const SimConfig& cfg);

  // The last_* arguments are the most recently spawned agent on each lane, or
  // null.
  std::vector<Agent> spawn(int tick, const Agent* last_north_south, const Agent* last_west_east);

  int spawned() const { return next_id_; }

 private:
  std::uint32_t draw_k();

  SimConfig cfg_;
  std::mt19937 rng_;
  int next_id_ = 0;
};

enum class Transition { none, enter, exit };

// Entry when the distance to the center first drops to R or below; exit when
// the distance traveled since entry first reaches 2R.
Transition region_transition_check(const Agent& agent, const SimConfig& cfg);

class SimulationAbort : public std::runtime_error {
 public:
  SimulationAbort(int tick, const std::string& message, std::string diagnostic)
      : std::runtime_error("tick " + std::to_string(tick) + ": " + message), tick_(tick), diagnostic_(std::move(diagnostic)) {}
  int tick() const { return tick_; }
  // Scene listing plus an LP-format dump of the failing problem.
  const std::string& diagnostic() const { return diagnostic_; }

 private:
  int tick_;
  std::string diagnostic_;
};

// Runs the full receding-horizon simulation. Throws ConfigError for an
// invalid configuration and SimulationAbort when a scene cannot be solved.
TrajectoryLog run_sim(const SimConfig& cfg);

}  // namespace crossflow
