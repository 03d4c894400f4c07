#pragma once

#include <cstdint>
#include <list>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crossflow/config.hpp"
#include "crossflow/intersection_model.hpp"
#include "crossflow/milp.hpp"

namespace crossflow::detail {

struct SceneSolveStats {
  long nodes = 0;
  int milp_solves = 0;
  int rounds = 0;
};

// Solves the full scene MILP by lazy constraint generation. Coupling rows
// (same-lane and cross pairs) enter a working set only once the assembled
// plan violates them, or all at once when lazy_pairs is off; agents linked through the working set are solved
// together as one component. The final plan satisfies every pair of the full
// model, so its objective is the full model's optimum up to the branch and
// bound gap. Pairs that end a tick close to binding carry over to the next
// tick. The previous tick's plans, shifted one step, seed each branch and
// bound with an incumbent.
class SceneSolver {
 public:
  explicit SceneSolver(const SimConfig& cfg) : cfg_(cfg) {}

  // Plans in scene order. Throws SimulationAbort on a failed component.
  HorizonPlan solve(const SceneSnapshot& scene, SceneSolveStats& stats);

 private:
  void solve_component(const SceneSnapshot& scene, const std::vector<int>& members,
                       const PairSelection& all, const std::vector<int>& same_idx,
                       const std::vector<int>& cross_idx, std::vector<AgentPlan>& plans, SceneSolveStats& stats);

  const milp::Basis* cached_basis(std::uint64_t key) const;
  void store_basis(std::uint64_t key, milp::Basis basis);

  // Binary values implied by each member's previous plan, shifted one step.
  std::vector<std::pair<int, double>> hint_from_previous(const BuiltModel& model, const SceneSnapshot& sub) const;

  SimConfig cfg_;
  std::unordered_map<int, AgentPlan> previous_;  // last tick's plan by agent id
  std::set<std::pair<int, int>> same_;   // (leader id, follower id)
  std::set<std::pair<int, int>> cross_;  // (west-east id, north-south id)

  static constexpr std::size_t kCacheCapacity = 512;
  std::list<std::pair<std::uint64_t, milp::Basis>> cache_;  // most recent first
  std::unordered_map<std::uint64_t, std::list<std::pair<std::uint64_t, milp::Basis>>::iterator> cache_index_;
};

// Fingerprint of the constraint matrix, senses, integrality and objective
// coefficients; bounds and right-hand sides are left out because a basis
// stays dual feasible when only those change.
std::uint64_t structure_key(const milp::MilpProblem& problem);

}  // namespace crossflow::detail
