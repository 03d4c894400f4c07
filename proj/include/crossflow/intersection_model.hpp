#pragma once

// Builds the per-tick centralized MILP for the agents inside the control
// region and maps solutions back to per-agent horizon plans.

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "crossflow/config.hpp"
#include "crossflow/dynamics.hpp"
#include "crossflow/milp.hpp"

namespace crossflow {

struct SceneAgent {
  int id = 0;
  Lane lane = Lane::west_east;
  StateVector state;
  int entry_ordinal = 0;  // region entry order, unique within a lane
};

struct SceneSnapshot {
  std::vector<SceneAgent> agents;
  int tick = 0;
};

// Pairs are indices into SceneSnapshot::agents.
struct PairSelection {
  // (leader, follower) pairs on one lane.
  std::vector<std::pair<int, int>> same_lane;
  // (west_east agent, north_south agent) pairs.
  std::vector<std::pair<int, int>> cross;
};

// Every consecutive same-lane pair by entry order, and every cross pair in
// which both agents are short of s_dist past the center.
PairSelection default_pairs(const SceneSnapshot& scene, const SimConfig& cfg);

bool cross_pair_active(const StateVector& a, const StateVector& b, double s_dist);

enum class VarKind { state, control, slack };

class IndexMap {
 public:
  int horizon() const { return horizon_; }
  int num_agents() const { return static_cast<int>(base_.size()); }

  // step in 1..N; component 0 = pos, 1 = vel.
  int state(int agent, int step, int component) const { return base_[agent] + 2 * (step - 1) + component; }
  // step in 0..N-1.
  int control(int agent, int step) const { return base_[agent] + 2 * horizon_ + step; }
  // step in 1..N.
  int slack(int agent, int step, int component) const { return base_[agent] + 3 * horizon_ + 2 * (step - 1) + component; }
  // Sign binary of the agent's position at step 1..N, or -1 when the agent
  // has none.
  int sign_binary(int agent, int step) const;
  // Crossing-order binary of cross pair k (fixed-crossing-order mode only).
  int order_binary(int pair) const { return order_[pair]; }

  int index(int agent, VarKind kind, int step, int component) const;

 private:
  friend struct ModelBuilder;
  int horizon_ = 0;
  std::vector<int> base_;
  std::vector<int> sign_base_;  // -1 when absent
  std::vector<int> order_;
};

struct BuiltModel {
  milp::MilpProblem problem;
  IndexMap map;
  PairSelection pairs;
};

struct BuildOptions {
  // Defaults to default_pairs(scene, cfg).
  std::optional<PairSelection> pairs;
  bool name_variables = false;
};

// Throws std::invalid_argument for an empty scene, N < 2, or inconsistent
// bounds in cfg.
BuiltModel build_model(const SceneSnapshot& scene, const SimConfig& cfg, const BuildOptions& opts = {});

// Extremal positions reachable at steps 0..N under the input and speed
// limits: (lowest, highest).
std::pair<std::vector<double>, std::vector<double>> reachable_positions(const StateVector& s0, const SimConfig& cfg);

struct AgentPlan {
  int id = 0;
  std::vector<StateVector> states;  // steps 0..N
  std::vector<double> controls;     // steps 0..N-1
};

struct HorizonPlan {
  std::vector<AgentPlan> agents;  // scene order
};

class PlanError : public std::runtime_error {
 public:
  explicit PlanError(milp::SolveStatus status);
  milp::SolveStatus status() const { return status_; }

 private:
  milp::SolveStatus status_;
};

// Throws PlanError unless the solution is optimal.
HorizonPlan extract_plan(const milp::MilpSolution& solution, const BuiltModel& model, const SceneSnapshot& scene);

}  // namespace crossflow
