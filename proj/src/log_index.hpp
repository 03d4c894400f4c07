#pragma once

#include <algorithm>
#include <vector>

#include "crossflow/trajectory_log.hpp"

namespace crossflow::detail {

struct TickEntry {
  int agent = 0;  // index into TrajectoryLog::agents
  Lane lane = Lane::west_east;
  double pos = 0.0;
  const LogSample* sample = nullptr;
};

struct TickPositions {
  int tick = 0;
  std::vector<TickEntry> entries;
};

// Regroups per-agent trajectories by tick. Sample k of an agent belongs to
// tick spawn_tick + k.
inline std::vector<TickPositions> positions_by_tick(const TrajectoryLog& log) {
  int last = -1;
  for (const auto& a : log.agents) last = std::max(last, a.spawn_tick + static_cast<int>(a.trajectory.size()) - 1);
  std::vector<TickPositions> out(last + 1);
  for (int t = 0; t <= last; ++t) out[t].tick = t;
  for (int i = 0; i < static_cast<int>(log.agents.size()); ++i) {
    const auto& a = log.agents[i];
    for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
      const auto& s = a.trajectory[k];
      const int tick = a.spawn_tick + static_cast<int>(k);
      if (tick < 0) continue;
      out[tick].entries.push_back({i, a.lane, lane_position(a, s), &s});
    }
  }
  return out;
}

}  // namespace crossflow::detail
