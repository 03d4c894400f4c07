#pragma once

#include <string>
#include <vector>

#include "crossflow/trajectory_log.hpp"

namespace crossflow {

enum class ViolationKind {
  same_lane_gap,
  cross_separation,
  dynamics,
  kinematics,
  velocity_bound,
  timestamp,
  phase,
};

const char* to_string(ViolationKind kind);

struct LogViolation {
  ViolationKind kind = ViolationKind::same_lane_gap;
  int tick = 0;
  std::vector<int> agents;  // agent ids
  double magnitude = 0.0;   // amount by which the bound is missed
  std::string describe() const;
};

struct VerifyTolerances {
  double separation = 1e-6;  // m
  double dynamics = 1e-6;
  double velocity = 1e-9;  // m/s above v_max
};

// Post-hoc audit of a trajectory log:
//  - consecutive same-lane agents are at least d_safe apart at every tick
//  - cross pairs short of s_dist past the center keep |d_p| + |d_q| >= s_dist
//  - in-region transitions replay through the dynamics with the logged control
//  - out-of-region transitions advance exactly v_max * dt
//  - speeds stay in [0, v_max], timestamps increase, in-region flags match
//    the entry and exit ticks
std::vector<LogViolation> verify_log(const TrajectoryLog& log, const VerifyTolerances& tol = {});

}  // namespace crossflow
