#include "crossflow/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "log_index.hpp"

namespace crossflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::optional<DelayRecord> compute_delay(const AgentLog& agent, const SimConfig& cfg) {
  if (!agent.entry_tick || !agent.exit_tick) return std::nullopt;
  DelayRecord r;
  r.agent_id = agent.id;
  r.ideal_time = 2.0 * cfg.radius / cfg.v_max;
  r.actual_time = (*agent.exit_tick - *agent.entry_tick) * cfg.dt;
  r.delay = r.actual_time - r.ideal_time;
  return r;
}

std::vector<DelayRecord> compute_delays(const TrajectoryLog& log) {
  std::vector<DelayRecord> out;
  for (const auto& a : log.agents) {
    if (auto r = compute_delay(a, log.config)) out.push_back(*r);
  }
  return out;
}

double average_delay(const TrajectoryLog& log) {
  const auto delays = compute_delays(log);
  if (delays.empty()) throw NoDataError("average_delay: no agent completed the control region");
  double sum = 0.0;
  for (const auto& d : delays) sum += d.delay;
  return sum / static_cast<double>(delays.size());
}

SeparationMinima separation_minima(const TrajectoryLog& log) {
  SeparationMinima out{kInf, kInf};
  const double s_dist = log.config.s_dist;
  for (const auto& tick : detail::positions_by_tick(log)) {
    double best[2] = {kInf, kInf};  // smallest |pos| among pre-clearance agents per lane
    std::vector<double> lanes[2];
    for (const auto& e : tick.entries) {
      const int l = e.lane == Lane::west_east ? 0 : 1;
      lanes[l].push_back(e.pos);
      if (e.pos < s_dist) best[l] = std::min(best[l], std::abs(e.pos));
    }
    for (auto& positions : lanes) {
      std::sort(positions.begin(), positions.end());
      for (std::size_t k = 1; k < positions.size(); ++k) out.min_gap = std::min(out.min_gap, positions[k] - positions[k - 1]);
    }
    if (best[0] < kInf && best[1] < kInf) out.min_cross_sep = std::min(out.min_cross_sep, best[0] + best[1]);
  }
  return out;
}

std::optional<double> center_crossing_time(const AgentLog& agent) {
  for (std::size_t k = 1; k < agent.trajectory.size(); ++k) {
    const auto& a = agent.trajectory[k - 1];
    const auto& b = agent.trajectory[k];
    const double pa = lane_position(agent, a), pb = lane_position(agent, b);
    if (pa < 0.0 && pb >= 0.0) {
      if (pb == pa) return b.t;
      return a.t + (b.t - a.t) * (-pa) / (pb - pa);
    }
  }
  if (!agent.trajectory.empty() && lane_position(agent, agent.trajectory.front()) == 0.0) return agent.trajectory.front().t;
  return std::nullopt;
}

PlatoonStats platoon_stats(const TrajectoryLog& log, double headway_threshold) {
  PlatoonStats out;
  out.min_headway = kInf;
  for (Lane lane : {Lane::north_south, Lane::west_east}) {
    std::vector<double> times;
    for (const auto& a : log.agents) {
      if (a.lane != lane) continue;
      if (auto t = center_crossing_time(a)) times.push_back(*t);
    }
    std::sort(times.begin(), times.end());
    int size = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (k > 0 && times[k] - times[k - 1] <= headway_threshold) {
        ++size;
        out.headways.push_back(times[k] - times[k - 1]);
        out.min_headway = std::min(out.min_headway, times[k] - times[k - 1]);
        continue;
      }
      if (size > 0) ++out.size_histogram[size];
      size = 1;
    }
    if (size > 0) ++out.size_histogram[size];
  }
  long members = 0;
  for (const auto& [size, count] : out.size_histogram) {
    out.platoons += count;
    members += static_cast<long>(size) * count;
  }
  out.mean_size = out.platoons > 0 ? static_cast<double>(members) / out.platoons : 0.0;
  if (!out.headways.empty()) {
    double sum = 0.0;
    for (double h : out.headways) sum += h;
    out.mean_headway = sum / static_cast<double>(out.headways.size());
  }
  return out;
}

RunSummary summarize(const TrajectoryLog& log) {
  RunSummary s;
  s.radius = log.config.radius;
  s.s_dist = log.config.s_dist;
  s.seed = log.config.seed;
  const auto delays = compute_delays(log);
  s.agents_spawned = static_cast<int>(log.agents.size());
  s.agents_completed = static_cast<int>(delays.size());
  if (!delays.empty()) s.average_delay = average_delay(log);
  int active = 0;
  for (const auto& t : log.ticks) {
    s.total_solver_time += t.solver_time;
    s.max_tick_solver_time = std::max(s.max_tick_solver_time, t.solver_time);
    if (t.in_region > 0) ++active;
  }
  s.active_duration = active * log.config.dt;
  s.mean_tick_solver_time = active > 0 ? s.total_solver_time / active : 0.0;
  const auto minima = separation_minima(log);
  s.min_gap = minima.min_gap;
  s.min_cross_sep = minima.min_cross_sep;
  return s;
}

const std::string& summary_csv_header() {
  static const std::string header =
      "radius,s_dist,seed,average_delay,total_solver_time,agents_spawned,agents_completed,min_gap,min_cross_sep,status";
  return header;
}

std::string summary_csv_row(const RunSummary& s) {
  std::ostringstream out;
  out << format_double(s.radius) << ',' << format_double(s.s_dist) << ',' << s.seed << ','
      << (s.average_delay ? format_double(*s.average_delay) : std::string()) << ',' << format_double(s.total_solver_time)
      << ',' << s.agents_spawned << ',' << s.agents_completed << ',' << format_double(s.min_gap) << ','
      << format_double(s.min_cross_sep) << ',' << s.status;
  return out.str();
}

namespace {

double field_double(const std::string& text) {
  if (text == "inf") return kInf;
  if (text == "-inf") return -kInf;
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument(text);
  return v;
}

}  // namespace

RunSummary parse_summary_csv_row(const std::string& row) {
  std::vector<std::string> f;
  std::stringstream in(row);
  std::string cell;
  while (std::getline(in, cell, ',')) f.push_back(cell);
  if (!row.empty() && row.back() == ',') f.emplace_back();
  if (f.size() != 10) throw std::runtime_error("summary row has " + std::to_string(f.size()) + " fields, expected 10");
  RunSummary s;
  try {
    s.radius = field_double(f[0]);
    s.s_dist = field_double(f[1]);
    s.seed = std::stoull(f[2]);
    if (!f[3].empty()) s.average_delay = field_double(f[3]);
    s.total_solver_time = field_double(f[4]);
    s.agents_spawned = std::stoi(f[5]);
    s.agents_completed = std::stoi(f[6]);
    s.min_gap = field_double(f[7]);
    s.min_cross_sep = field_double(f[8]);
  } catch (const std::logic_error&) {
    throw std::runtime_error("malformed summary row '" + row + "'");
  }
  s.status = f[9];
  return s;
}

void write_summary_csv(const std::vector<RunSummary>& rows, std::ostream& out) {
  out << summary_csv_header() << '\n';
  for (const auto& r : rows) out << summary_csv_row(r) << '\n';
}

}  // namespace crossflow
