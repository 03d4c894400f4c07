#include "crossflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crossflow/dynamics.hpp"
#include "log_index.hpp"

namespace crossflow {

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::same_lane_gap: return "same_lane_gap";
    case ViolationKind::cross_separation: return "cross_separation";
    case ViolationKind::dynamics: return "dynamics";
    case ViolationKind::kinematics: return "kinematics";
    case ViolationKind::velocity_bound: return "velocity_bound";
    case ViolationKind::timestamp: return "timestamp";
    case ViolationKind::phase: return "phase";
  }
  return "?";
}

std::string LogViolation::describe() const {
  std::ostringstream out;
  out << to_string(kind) << " at tick " << tick << " agents";
  for (int a : agents) out << ' ' << a;
  out << ": off by " << format_double(magnitude);
  return out.str();
}

namespace {

void check_separation(const TrajectoryLog& log, const VerifyTolerances& tol, std::vector<LogViolation>& out) {
  const auto& cfg = log.config;
  for (const auto& tick : detail::positions_by_tick(log)) {
    std::vector<const detail::TickEntry*> lanes[2];
    for (const auto& e : tick.entries) lanes[e.lane == Lane::west_east ? 0 : 1].push_back(&e);
    for (auto& lane : lanes) {
      std::sort(lane.begin(), lane.end(), [](auto* a, auto* b) { return a->pos < b->pos; });
      for (std::size_t k = 1; k < lane.size(); ++k) {
        const double gap = lane[k]->pos - lane[k - 1]->pos;
        if (gap < cfg.d_safe - tol.separation) {
          out.push_back({ViolationKind::same_lane_gap, tick.tick,
                         {log.agents[lane[k]->agent].id, log.agents[lane[k - 1]->agent].id}, cfg.d_safe - gap});
        }
      }
    }
    for (const auto* p : lanes[0]) {
      if (p->pos >= cfg.s_dist) continue;
      for (const auto* q : lanes[1]) {
        if (q->pos >= cfg.s_dist) continue;
        const double sep = std::abs(p->pos) + std::abs(q->pos);
        if (sep < cfg.s_dist - tol.separation) {
          out.push_back({ViolationKind::cross_separation, tick.tick,
                         {log.agents[p->agent].id, log.agents[q->agent].id}, cfg.s_dist - sep});
        }
      }
    }
  }
}

void check_agent(const TrajectoryLog& log, const AgentLog& a, const VerifyTolerances& tol,
                 std::vector<LogViolation>& out) {
  const auto& cfg = log.config;
  const auto mats = discretize_double_integrator(cfg.dt);
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    const int tick = a.spawn_tick + static_cast<int>(k);
    const auto& s = a.trajectory[k];
    if (s.v < 0.0) out.push_back({ViolationKind::velocity_bound, tick, {a.id}, -s.v});
    if (s.v > cfg.v_max + tol.velocity) out.push_back({ViolationKind::velocity_bound, tick, {a.id}, s.v - cfg.v_max});

    const bool expected = a.entry_tick && tick >= *a.entry_tick && (!a.exit_tick || tick < *a.exit_tick);
    if (s.in_region != expected) out.push_back({ViolationKind::phase, tick, {a.id}, 1.0});

    if (k + 1 >= a.trajectory.size()) continue;
    const auto& next = a.trajectory[k + 1];
    if (!(next.t > s.t)) out.push_back({ViolationKind::timestamp, tick + 1, {a.id}, s.t - next.t});
    const double pos = lane_position(a, s);
    const double next_pos = lane_position(a, next);
    if (s.in_region) {
      const StateVector want = step({pos, s.v}, s.u, mats);
      const double err = std::max(std::abs(want.pos - next_pos), std::abs(want.vel - next.v));
      if (err > tol.dynamics) out.push_back({ViolationKind::dynamics, tick, {a.id}, err});
    } else {
      const double want = kinematic_advance(pos, cfg.v_max, cfg.dt);
      if (want != next_pos) out.push_back({ViolationKind::kinematics, tick, {a.id}, std::abs(want - next_pos)});
    }
  }
}

}  // namespace

std::vector<LogViolation> verify_log(const TrajectoryLog& log, const VerifyTolerances& tol) {
  std::vector<LogViolation> out;
  check_separation(log, tol, out);
  for (const auto& a : log.agents) check_agent(log, a, tol, out);
  std::stable_sort(out.begin(), out.end(), [](const LogViolation& x, const LogViolation& y) { return x.tick < y.tick; });
  return out;
}

}  // namespace crossflow
