#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>

#include "crossflow/milp.hpp"
#include "milp/dual_simplex.hpp"

namespace crossflow::milp {

namespace {

using detail::Clock;
using detail::DualSimplex;
using detail::LpData;
using detail::LpStatus;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::optional<Clock::time_point> deadline_from(const SolverOptions& opts, Clock::time_point start) {
  if (!opts.time_limit) return std::nullopt;
  return start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*opts.time_limit));
}

long iteration_budget(const LpData& lp) { return 50L * (lp.n + lp.m) + 10000; }

// Solves from the simplex's current basis, retrying once from the slack basis
// when the factorization breaks down.
LpStatus run_lp(DualSimplex& lp, const LpData& data, std::optional<Clock::time_point> deadline) {
  LpStatus status = lp.solve(iteration_budget(data), deadline);
  if (status == LpStatus::numerical_failure || status == LpStatus::iteration_limit) {
    lp.load_slack_basis();
    status = lp.solve(iteration_budget(data), deadline);
  }
  return status;
}

void fill_values(const DualSimplex& lp, const LpData& data, MilpSolution& out) {
  out.values.assign(lp.values().begin(), lp.values().begin() + data.n);
}

double user_objective(double internal, const LpData& data, const MilpProblem& problem) {
  return data.objective_sign * internal + problem.objective().constant;
}

}  // namespace

MilpSolution solve_lp_relaxation(const MilpProblem& problem, const SolverOptions& opts) {
  problem.validate();
  const auto start = Clock::now();
  const LpData data = LpData::from_problem(problem);
  DualSimplex lp(data);
  if (opts.warm_start) lp.load_basis(*opts.warm_start);

  MilpSolution out;
  const LpStatus status = run_lp(lp, data, deadline_from(opts, start));
  out.lp_iterations = lp.iterations();
  switch (status) {
    case LpStatus::optimal:
      out.status = SolveStatus::optimal;
      fill_values(lp, data, out);
      out.objective = user_objective(lp.objective(), data, problem);
      out.best_bound = out.objective;
      out.root_bound = out.objective;
      out.root_basis = lp.basis();
      break;
    case LpStatus::infeasible: out.status = SolveStatus::infeasible; break;
    case LpStatus::unbounded: out.status = SolveStatus::unbounded; break;
    default: out.status = SolveStatus::limit_reached; break;
  }
  out.wall_time = seconds_since(start);
  return out;
}

namespace {

struct WarmStart {
  Basis basis;
  std::vector<double> weights;
};

struct Node {
  double bound = 0.0;  // internal minimization form
  long id = 0;
  int depth = 0;
  std::vector<std::pair<int, double>> fixings;  // (variable, value)
  std::shared_ptr<const WarmStart> basis;
  int branch_var = -1;  // binary fixed last, with its fractional part in the parent
  double branch_frac = 0.0;
};

// Average objective degradation per unit change, learned from solved children.
class Pseudocosts {
 public:
  explicit Pseudocosts(int n) : sum_(2 * n, 0.0), count_(2 * n, 0) {}

  void record(int var, bool up, double frac, double gain) {
    const double dist = up ? 1.0 - frac : frac;
    if (dist < 1e-9) return;
    const double unit = std::max(gain, 0.0) / dist;
    sum_[slot(var, up)] += unit;
    ++count_[slot(var, up)];
    total_sum_[up] += unit;
    ++total_count_[up];
  }

  double score(int var, double frac) const {
    constexpr double eps = 1e-6;
    const double down = estimate(var, false) * frac;
    const double up = estimate(var, true) * (1.0 - frac);
    return std::max(down, eps) * std::max(up, eps);
  }

 private:
  int slot(int var, bool up) const { return 2 * var + (up ? 1 : 0); }
  double estimate(int var, bool up) const {
    const int k = slot(var, up);
    if (count_[k] > 0) return sum_[k] / count_[k];
    return total_count_[up] > 0 ? total_sum_[up] / total_count_[up] : 1.0;
  }

  std::vector<double> sum_;
  std::vector<int> count_;
  double total_sum_[2] = {0.0, 0.0};
  long total_count_[2] = {0, 0};
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

}  // namespace

MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& opts) {
  problem.validate();
  if (problem.num_binaries() == 0) return solve_lp_relaxation(problem, opts);

  const auto start = Clock::now();
  const auto deadline = deadline_from(opts, start);
  const LpData data = LpData::from_problem(problem);
  DualSimplex lp(data);
  if (opts.warm_start) lp.load_basis(*opts.warm_start);

  std::vector<int> binaries;
  for (int j = 0; j < data.n; ++j) {
    if (problem.variables()[j].integrality == Integrality::binary) binaries.push_back(j);
  }

  MilpSolution out;
  bool have_incumbent = false;
  double incumbent = kInf;  // internal minimization form
  std::vector<double> incumbent_values;

  auto gap_allows_prune = [&](double bound) {
    if (!have_incumbent) return false;
    const double gap = std::max(opts.absolute_gap, opts.relative_gap * std::abs(incumbent));
    return bound >= incumbent - gap;
  };

  auto apply_fixings = [&](const std::vector<std::pair<int, double>>& fixings) {
    lp.reset_col_bounds();
    for (const auto& [var, value] : fixings) lp.set_col_bounds(var, value, value);
  };

  // Fixes every binary at its rounded value and re-solves the continuous part so
  // the incumbent is exactly integral.
  // Start the simplex currently holds, when it is one shared with open nodes.
  const WarmStart* hot = nullptr;

  auto polish = [&](const std::vector<std::pair<int, double>>& fixings) -> bool {
    hot = nullptr;
    const std::vector<double> relaxed(lp.values().begin(), lp.values().begin() + data.n);
    for (int j : binaries) {
      const double v = std::round(relaxed[j]);
      lp.set_col_bounds(j, v, v);
    }
    const LpStatus status = run_lp(lp, data, deadline);
    bool improved = false;
    if (status == LpStatus::optimal) {
      const double obj = lp.objective();
      if (!have_incumbent || obj < incumbent) {
        incumbent = obj;
        incumbent_values.assign(lp.values().begin(), lp.values().begin() + data.n);
        for (int j : binaries) incumbent_values[j] = std::round(incumbent_values[j]);
        have_incumbent = true;
        improved = true;
      }
    }
    apply_fixings(fixings);
    return improved;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  bool limit_hit = false;
  bool root_unbounded = false;
  bool root_done = false;
  double best_bound = -kInf;
  Pseudocosts pseudo(data.n);
  std::optional<Node> dive;  // child processed next while it stays hot

  auto process = [&](const Node& node) {
    apply_fixings(node.fixings);
    if (node.basis && node.basis.get() != hot) lp.load_basis(node.basis->basis, node.basis->weights);
    hot = nullptr;
    const LpStatus status = run_lp(lp, data, deadline);
    ++out.node_count;
    if (!root_done) {
      root_done = true;
      if (status == LpStatus::optimal) {
        out.root_basis = lp.basis();
        out.root_bound = user_objective(lp.objective(), data, problem);
      }
      if (status == LpStatus::unbounded) root_unbounded = true;
    }
    if (status == LpStatus::time_limit || status == LpStatus::iteration_limit ||
        status == LpStatus::numerical_failure) {
      limit_hit = true;
      return;
    }
    if (status != LpStatus::optimal) return;
    const double obj = lp.objective();
    if (node.branch_var >= 0) {
      const bool up = node.fixings.back().second > 0.5;
      pseudo.record(node.branch_var, up, node.branch_frac, obj - node.bound);
    }
    if (gap_allows_prune(obj)) return;

    const auto& x = lp.values();
    int branch = -1;
    double branch_frac = 0.0;
    double best_score = -1.0;
    for (int j : binaries) {
      const double frac = x[j] - std::floor(x[j]);
      if (std::min(frac, 1.0 - frac) <= opts.integrality_tol) continue;
      const double score = pseudo.score(j, frac);
      if (score > best_score) {
        best_score = score;
        branch = j;
        branch_frac = frac;
      }
    }
    if (branch < 0) {
      polish(node.fixings);
      return;
    }
    auto basis = std::make_shared<const WarmStart>(WarmStart{lp.basis(), lp.pricing_weights()});
    hot = basis.get();
    const double toward = branch_frac >= 0.5 ? 1.0 : 0.0;
    for (double value : {0.0, 1.0}) {
      Node child;
      child.bound = obj;
      child.id = next_id++;
      child.depth = node.depth + 1;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch, value);
      child.basis = basis;
      child.branch_var = branch;
      child.branch_frac = branch_frac;
      if (value == toward && opts.plunge) {
        dive = std::move(child);
      } else {
        open.push(std::move(child));
      }
    }
  };

  for (const auto& [var, value] : opts.incumbent_hint) {
    if (var < 0 || var >= data.n || problem.variables()[var].integrality != Integrality::binary) {
      throw std::invalid_argument("incumbent hint names a variable that is not binary");
    }
  }

  Node root;
  root.id = next_id++;
  process(root);
  if (!opts.incumbent_hint.empty() && !limit_hit && !open.empty()) {
    hot = nullptr;
    lp.reset_col_bounds();
    for (const auto& [var, value] : opts.incumbent_hint) {
      const double v = value >= 0.5 ? 1.0 : 0.0;
      lp.set_col_bounds(var, v, v);
    }
    if (run_lp(lp, data, deadline) == LpStatus::optimal) {
      polish({});
    } else {
      apply_fixings({});
    }
  }
  if (root_unbounded) {
    out.status = SolveStatus::unbounded;
    out.lp_iterations = lp.iterations();
    out.wall_time = seconds_since(start);
    return out;
  }

  while ((dive || !open.empty()) && !limit_hit) {
    if (out.node_count >= opts.max_nodes || (deadline && Clock::now() > *deadline)) {
      limit_hit = true;
      break;
    }
    Node node;
    if (dive) {
      node = std::move(*dive);
      dive.reset();
    } else {
      if (gap_allows_prune(open.top().bound)) break;
      node = open.top();
      open.pop();
    }
    process(node);
  }
  if (dive) {
    open.push(std::move(*dive));
    dive.reset();
  }

  best_bound = have_incumbent ? incumbent : kInf;
  if (!open.empty()) best_bound = std::min(best_bound, open.top().bound);
  out.lp_iterations = lp.iterations();
  out.best_bound = data.objective_sign * best_bound + problem.objective().constant;

  if (have_incumbent) {
    out.values = std::move(incumbent_values);
    out.objective = user_objective(incumbent, data, problem);
    const bool exhausted = open.empty() || gap_allows_prune(open.top().bound);
    out.status = (limit_hit && !exhausted) ? SolveStatus::limit_reached : SolveStatus::optimal;
  } else {
    out.status = limit_hit ? SolveStatus::limit_reached : SolveStatus::infeasible;
  }
  out.wall_time = seconds_since(start);
  return out;
}

}  // namespace crossflow::milp
