#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossflow/config.hpp"
#include "crossflow/trajectory_log.hpp"

namespace crossflow {

struct DelayRecord {
  int agent_id = 0;
  double ideal_time = 0.0;   // 2R / v_max
  double actual_time = 0.0;  // (exit_tick - entry_tick) * dt
  double delay = 0.0;
};

// Empty for an agent without both entry and exit ticks.
std::optional<DelayRecord> compute_delay(const AgentLog& agent, const SimConfig& cfg);
std::vector<DelayRecord> compute_delays(const TrajectoryLog& log);

class NoDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mean delay over completed agents. Throws NoDataError when none completed.
double average_delay(const TrajectoryLog& log);

// Global minima over every tick; +inf when no pair ever applies.
struct SeparationMinima {
  double min_gap = 0.0;        // same lane, m
  double min_cross_sep = 0.0;  // |d_p| + |d_q| over pre-clearance cross pairs, m
};
SeparationMinima separation_minima(const TrajectoryLog& log);

struct PlatoonStats {
  std::map<int, int> size_histogram;  // platoon size -> count
  int platoons = 0;
  double mean_size = 0.0;
  double mean_headway = 0.0;  // mean intra-platoon crossing headway, s; 0 without any
  double min_headway = 0.0;   // +inf without any
  std::vector<double> headways;
};

// Crossings of the center are clustered per lane: consecutive crossing times
// at most `headway_threshold` apart share a platoon.
PlatoonStats platoon_stats(const TrajectoryLog& log, double headway_threshold);

// Time an agent's lane position reached 0, interpolated linearly between the
// two bracketing samples; empty if it never did.
std::optional<double> center_crossing_time(const AgentLog& agent);

struct RunSummary {
  double radius = 0.0;
  double s_dist = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> average_delay;
  double total_solver_time = 0.0;
  double max_tick_solver_time = 0.0;
  double mean_tick_solver_time = 0.0;  // over ticks with a non-empty scene
  double active_duration = 0.0;        // ticks with a non-empty scene * dt
  int agents_spawned = 0;
  int agents_completed = 0;
  double min_gap = 0.0;
  double min_cross_sep = 0.0;
  std::string status = "ok";
};

RunSummary summarize(const TrajectoryLog& log);

// CSV columns: radius, s_dist, seed, average_delay, total_solver_time,
// agents_spawned, agents_completed, min_gap, min_cross_sep, status. An
// undefined average or minimum is written as an empty field or "inf".
const std::string& summary_csv_header();
std::string summary_csv_row(const RunSummary& s);
// Throws std::runtime_error on a malformed row.
RunSummary parse_summary_csv_row(const std::string& row);
void write_summary_csv(const std::vector<RunSummary>& rows, std::ostream& out);

}  // namespace crossflow
