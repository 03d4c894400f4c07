#include "scene_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "crossflow/simulation.hpp"

namespace crossflow::detail {

namespace {

constexpr double kViolationTol = 1e-7;

class Fnv {
 public:
  void add(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
      h_ ^= (v >> (8 * k)) & 0xffu;
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    add(bits);
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double same_lane_slack(const AgentPlan& lead, const AgentPlan& follow, double d_safe) {
  double worst = milp::kInf;
  for (std::size_t i = 1; i < lead.states.size(); ++i) {
    worst = std::min(worst, lead.states[i].pos - follow.states[i].pos - d_safe);
  }
  return worst;
}

double cross_slack(const AgentPlan& a, const AgentPlan& b, double s_dist) {
  double worst = milp::kInf;
  for (std::size_t i = 1; i < a.states.size(); ++i) {
    worst = std::min(worst, std::abs(a.states[i].pos) + std::abs(b.states[i].pos) - s_dist);
  }
  return worst;
}

std::string describe_scene(const SceneSnapshot& scene) {
  std::ostringstream out;
  out << "scene at tick " << scene.tick << " (" << scene.agents.size() << " agents)\n";
  out << "id lane pos vel entry_ordinal\n";
  for (const auto& a : scene.agents) {
    out << a.id << ' ' << to_string(a.lane) << ' ' << format_double(a.state.pos) << ' ' << format_double(a.state.vel)
        << ' ' << a.entry_ordinal << '\n';
  }
  return out.str();
}

}  // namespace

std::uint64_t structure_key(const milp::MilpProblem& problem) {
  Fnv h;
  h.add(static_cast<std::uint64_t>(problem.num_variables()));
  h.add(static_cast<std::uint64_t>(problem.num_constraints()));
  for (const auto& v : problem.variables()) h.add(static_cast<std::uint64_t>(v.integrality));
  for (const auto& c : problem.constraints()) {
    h.add(static_cast<std::uint64_t>(c.sense));
    h.add(static_cast<std::uint64_t>(c.terms.size()));
    for (const auto& t : c.terms) {
      h.add(static_cast<std::uint64_t>(t.var));
      h.add(t.coef);
    }
  }
  h.add(static_cast<std::uint64_t>(problem.objective().sense));
  for (const auto& t : problem.objective().terms) {
    h.add(static_cast<std::uint64_t>(t.var));
    h.add(t.coef);
  }
  return h.value();
}

const milp::Basis* SceneSolver::cached_basis(std::uint64_t key) const {
  const auto it = cache_index_.find(key);
  return it == cache_index_.end() ? nullptr : &it->second->second;
}

void SceneSolver::store_basis(std::uint64_t key, milp::Basis basis) {
  const auto it = cache_index_.find(key);
  if (it != cache_index_.end()) {
    it->second->second = std::move(basis);
    cache_.splice(cache_.begin(), cache_, it->second);
    return;
  }
  cache_.emplace_front(key, std::move(basis));
  cache_index_[key] = cache_.begin();
  if (cache_.size() > kCacheCapacity) {
    cache_index_.erase(cache_.back().first);
    cache_.pop_back();
  }
}

std::vector<std::pair<int, double>> SceneSolver::hint_from_previous(const BuiltModel& model,
                                                                    const SceneSnapshot& sub) const {
  std::vector<std::pair<int, double>> hint;
  const auto& vars = model.problem.variables();
  const int n = cfg_.horizon;
  for (int a = 0; a < static_cast<int>(sub.agents.size()); ++a) {
    if (model.map.sign_binary(a, 1) < 0) continue;
    const auto it = previous_.find(sub.agents[a].id);
    for (int i = 1; i <= n; ++i) {
      const int z = model.map.sign_binary(a, i);
      if (vars[z].lower == vars[z].upper) continue;
      // Agents without a plan hold short of the center.
      double pos = -1.0;
      if (it != previous_.end()) {
        const auto& states = it->second.states;
        const int last = static_cast<int>(states.size()) - 1;
        pos = i + 1 <= last ? states[i + 1].pos : states[last].pos + states[last].vel * cfg_.dt * (i + 1 - last);
      }
      hint.emplace_back(z, pos >= 0.0 ? 1.0 : 0.0);
    }
  }
  return hint;
}

void SceneSolver::solve_component(const SceneSnapshot& scene, const std::vector<int>& members,
                                  const PairSelection& all, const std::vector<int>& same_idx,
                                  const std::vector<int>& cross_idx, std::vector<AgentPlan>& plans,
                                  SceneSolveStats& stats) {
  SceneSnapshot sub;
  sub.tick = scene.tick;
  std::map<int, int> local;
  for (int g : members) {
    local[g] = static_cast<int>(sub.agents.size());
    sub.agents.push_back(scene.agents[g]);
  }
  PairSelection pairs;
  for (int k : same_idx) pairs.same_lane.emplace_back(local.at(all.same_lane[k].first), local.at(all.same_lane[k].second));
  for (int k : cross_idx) pairs.cross.emplace_back(local.at(all.cross[k].first), local.at(all.cross[k].second));

  BuildOptions bopts;
  bopts.pairs = pairs;
  const BuiltModel model = build_model(sub, cfg_, bopts);

  const std::uint64_t key = structure_key(model.problem);
  milp::SolverOptions sopts;
  sopts.relative_gap = cfg_.relative_gap;
  sopts.time_limit = cfg_.solve_time_limit;
  sopts.max_nodes = cfg_.max_nodes;
  sopts.warm_start = cached_basis(key);
  sopts.incumbent_hint = hint_from_previous(model, sub);
  const milp::MilpSolution sol = milp::solve_milp(model.problem, sopts);
  stats.nodes += sol.node_count;
  spdlog::trace("tick {}: component of {} agents, {} binaries, {} rows: {} nodes, root {:.6f}, objective {:.6f}",
                scene.tick, members.size(), model.problem.num_binaries(), model.problem.num_constraints(), sol.node_count,
                sol.root_bound, sol.objective);
  ++stats.milp_solves;

  if (sol.status != milp::SolveStatus::optimal) {
    bopts.name_variables = true;
    const BuiltModel named = build_model(sub, cfg_, bopts);
    std::ostringstream diag;
    diag << "solver status: " << milp::to_string(sol.status) << " after " << sol.node_count << " nodes\n";
    diag << describe_scene(sub);
    diag << "same-lane pairs (leader follower):";
    for (const auto& [a, b] : pairs.same_lane) diag << ' ' << sub.agents[a].id << '/' << sub.agents[b].id;
    diag << "\ncross pairs (west_east north_south):";
    for (const auto& [a, b] : pairs.cross) diag << ' ' << sub.agents[a].id << '/' << sub.agents[b].id;
    diag << "\n\n";
    milp::write_lp(named.problem, diag);
    throw SimulationAbort(scene.tick, std::string("scene solve failed: ") + milp::to_string(sol.status), diag.str());
  }
  if (sol.root_basis) store_basis(key, *sol.root_basis);

  HorizonPlan plan = extract_plan(sol, model, sub);
  for (std::size_t k = 0; k < members.size(); ++k) plans[members[k]] = std::move(plan.agents[k]);
}

HorizonPlan SceneSolver::solve(const SceneSnapshot& scene, SceneSolveStats& stats) {
  const int count = static_cast<int>(scene.agents.size());
  const PairSelection all = default_pairs(scene, cfg_);
  auto id_of = [&](int k) { return scene.agents[k].id; };

  std::vector<char> same_on(all.same_lane.size(), !cfg_.lazy_pairs), cross_on(all.cross.size(), !cfg_.lazy_pairs);
  for (std::size_t k = 0; k < all.same_lane.size(); ++k) {
    if (same_.count({id_of(all.same_lane[k].first), id_of(all.same_lane[k].second)})) same_on[k] = 1;
  }
  for (std::size_t k = 0; k < all.cross.size(); ++k) {
    if (cross_.count({id_of(all.cross[k].first), id_of(all.cross[k].second)})) cross_on[k] = 1;
  }

  std::vector<AgentPlan> plans(count);
  std::set<std::vector<int>> solved;  // component signatures solved this tick
  while (true) {
    ++stats.rounds;
    UnionFind uf(count);
    for (std::size_t k = 0; k < all.same_lane.size(); ++k) {
      if (same_on[k]) uf.unite(all.same_lane[k].first, all.same_lane[k].second);
    }
    for (std::size_t k = 0; k < all.cross.size(); ++k) {
      if (cross_on[k]) uf.unite(all.cross[k].first, all.cross[k].second);
    }
    std::map<int, std::vector<int>> members;
    std::map<int, std::vector<int>> same_idx, cross_idx;
    for (int a = 0; a < count; ++a) members[uf.find(a)].push_back(a);
    for (std::size_t k = 0; k < all.same_lane.size(); ++k) {
      if (same_on[k]) same_idx[uf.find(all.same_lane[k].first)].push_back(static_cast<int>(k));
    }
    for (std::size_t k = 0; k < all.cross.size(); ++k) {
      if (cross_on[k]) cross_idx[uf.find(all.cross[k].first)].push_back(static_cast<int>(k));
    }
    for (const auto& [root, group] : members) {
      std::vector<int> signature = group;
      signature.push_back(-1);
      for (int k : same_idx[root]) signature.push_back(k);
      signature.push_back(-2);
      for (int k : cross_idx[root]) signature.push_back(k);
      if (!solved.insert(signature).second) continue;
      solve_component(scene, group, all, same_idx[root], cross_idx[root], plans, stats);
    }

    bool added = false;
    for (std::size_t k = 0; k < all.same_lane.size(); ++k) {
      if (same_on[k]) continue;
      const auto [lead, follow] = all.same_lane[k];
      if (same_lane_slack(plans[lead], plans[follow], cfg_.d_safe) < -kViolationTol) same_on[k] = added = true;
    }
    for (std::size_t k = 0; k < all.cross.size(); ++k) {
      if (cross_on[k]) continue;
      const auto [we, ns] = all.cross[k];
      if (cross_slack(plans[we], plans[ns], cfg_.s_dist) < -kViolationTol) cross_on[k] = added = true;
    }
    if (!added) break;
  }

  // Constrained pairs stay in the working set while they remain candidates.
  same_.clear();
  cross_.clear();
  for (std::size_t k = 0; k < all.same_lane.size(); ++k) {
    if (same_on[k]) same_.insert({id_of(all.same_lane[k].first), id_of(all.same_lane[k].second)});
  }
  for (std::size_t k = 0; k < all.cross.size(); ++k) {
    if (cross_on[k]) cross_.insert({id_of(all.cross[k].first), id_of(all.cross[k].second)});
  }

  previous_.clear();
  for (const auto& plan : plans) previous_[plan.id] = plan;

  HorizonPlan out;
  out.agents = std::move(plans);
  return out;
}

}  // namespace crossflow::detail
