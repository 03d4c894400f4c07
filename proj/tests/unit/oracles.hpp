#pragma once

// Test-only reference solvers. They share no code with the simplex or the
// branch and bound under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "crossflow/milp.hpp"

namespace oracle {

using crossflow::milp::MilpProblem;

struct Hyperplane {
  std::vector<double> a;
  double b = 0.0;
};

// Solves the square system by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-10) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct LpOracleResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> point;
};

// Enumerates every basic solution of a bounded LP (all variables finitely
// bounded) and returns the best feasible vertex.
inline LpOracleResult vertex_enumeration(const MilpProblem& p) {
  const int n = p.num_variables();
  std::vector<Hyperplane> planes;
  for (const auto& c : p.constraints()) {
    Hyperplane h{std::vector<double>(n, 0.0), c.rhs};
    for (const auto& t : c.terms) h.a[t.var] += t.coef;
    planes.push_back(h);
  }
  for (int j = 0; j < n; ++j) {
    Hyperplane lo{std::vector<double>(n, 0.0), p.variables()[j].lower};
    lo.a[j] = 1.0;
    planes.push_back(lo);
    Hyperplane hi{std::vector<double>(n, 0.0), p.variables()[j].upper};
    hi.a[j] = 1.0;
    planes.push_back(hi);
  }
  const bool maximize = p.objective().sense == crossflow::milp::ObjectiveSense::maximize;
  auto value_of = [&](const std::vector<double>& x) {
    double v = p.objective().constant;
    for (const auto& t : p.objective().terms) v += t.coef * x[t.var];
    return v;
  };
  auto feasible = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j) {
      if (x[j] < p.variables()[j].lower - 1e-7 || x[j] > p.variables()[j].upper + 1e-7) return false;
    }
    for (const auto& c : p.constraints()) {
      double act = 0.0;
      for (const auto& t : c.terms) act += t.coef * x[t.var];
      switch (c.sense) {
        case crossflow::milp::Sense::less_equal: if (act > c.rhs + 1e-7) return false; break;
        case crossflow::milp::Sense::greater_equal: if (act < c.rhs - 1e-7) return false; break;
        case crossflow::milp::Sense::equal: if (std::abs(act - c.rhs) > 1e-7) return false; break;
      }
    }
    return true;
  };

  LpOracleResult best;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      std::vector<std::vector<double>> a(n);
      std::vector<double> b(n);
      for (int k = 0; k < n; ++k) {
        a[k] = planes[pick[k]].a;
        b[k] = planes[pick[k]].b;
      }
      auto x = solve_square(a, b);
      if (!x || !feasible(*x)) return;
      const double v = value_of(*x);
      if (!best.feasible || (maximize ? v > best.objective : v < best.objective)) {
        best = {true, v, *x};
      }
      return;
    }
    for (int i = start; i < static_cast<int>(planes.size()); ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

struct DenseLpResult {
  crossflow::milp::SolveStatus status = crossflow::milp::SolveStatus::infeasible;
  double objective = 0.0;
};

// Two-phase dense tableau simplex with Bland's rule. Every variable must have
// a finite lower bound; finite upper bounds become explicit rows.
inline DenseLpResult dense_simplex(const MilpProblem& p) {
  using crossflow::milp::Sense;
  using crossflow::milp::SolveStatus;
  const int n = p.num_variables();
  struct Row {
    std::vector<double> a;
    double b;
    Sense sense;
  };
  std::vector<Row> rows;
  std::vector<double> shift(n);
  for (int j = 0; j < n; ++j) shift[j] = p.variables()[j].lower;
  for (const auto& c : p.constraints()) {
    Row r{std::vector<double>(n, 0.0), c.rhs, c.sense};
    for (const auto& t : c.terms) {
      r.a[t.var] += t.coef;
      r.b -= t.coef * shift[t.var];
    }
    rows.push_back(r);
  }
  for (int j = 0; j < n; ++j) {
    const double u = p.variables()[j].upper;
    if (!std::isfinite(u)) continue;
    Row r{std::vector<double>(n, 0.0), u - shift[j], Sense::less_equal};
    r.a[j] = 1.0;
    rows.push_back(r);
  }
  // Normalize to b >= 0, then add one slack per inequality and one artificial
  // per row.
  const int m = static_cast<int>(rows.size());
  for (auto& r : rows) {
    if (r.b < 0.0) {
      for (double& v : r.a) v = -v;
      r.b = -r.b;
      if (r.sense == Sense::less_equal) r.sense = Sense::greater_equal;
      else if (r.sense == Sense::greater_equal) r.sense = Sense::less_equal;
    }
  }
  int slacks = 0;
  for (const auto& r : rows) slacks += r.sense != Sense::equal;
  const int cols = n + slacks + m;  // structural, slack, artificial
  std::vector<std::vector<double>> t(m, std::vector<double>(cols + 1, 0.0));
  std::vector<int> basis(m);
  int s = n;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = rows[i].a[j];
    if (rows[i].sense == Sense::less_equal) t[i][s++] = 1.0;
    if (rows[i].sense == Sense::greater_equal) t[i][s++] = -1.0;
    t[i][n + slacks + i] = 1.0;
    t[i][cols] = rows[i].b;
    basis[i] = n + slacks + i;
  }

  auto pivot = [&](int r, int c) {
    const double pv = t[r][c];
    for (double& v : t[r]) v /= pv;
    for (int i = 0; i < m; ++i) {
      if (i == r || t[i][c] == 0.0) continue;
      const double f = t[i][c];
      for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  };
  // Minimizes cost over the columns allowed by `usable`; false if unbounded.
  auto run = [&](const std::vector<double>& cost, const std::vector<char>& usable) {
    constexpr double eps = 1e-9;
    while (true) {
      int enter = -1;
      for (int j = 0; j < cols && enter < 0; ++j) {
        if (!usable[j]) continue;
        double d = cost[j];
        for (int i = 0; i < m; ++i) d -= cost[basis[i]] * t[i][j];
        if (d < -eps) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= eps) continue;
        const double ratio = t[i][cols] / t[i][enter];
        if (leave < 0 || ratio < best - eps || (ratio <= best + eps && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  };

  std::vector<double> phase1(cols, 0.0);
  for (int i = 0; i < m; ++i) phase1[n + slacks + i] = 1.0;
  run(phase1, std::vector<char>(cols, 1));
  double infeas = 0.0;
  for (int i = 0; i < m; ++i) infeas += phase1[basis[i]] * t[i][cols];
  if (infeas > 1e-7) return {SolveStatus::infeasible, 0.0};
  // Drive zero-level artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n + slacks) continue;
    for (int j = 0; j < n + slacks; ++j) {
      if (std::abs(t[i][j]) > 1e-9) {
        pivot(i, j);
        break;
      }
    }
  }

  const bool maximize = p.objective().sense == crossflow::milp::ObjectiveSense::maximize;
  std::vector<double> cost(cols, 0.0);
  double constant = p.objective().constant;
  for (const auto& term : p.objective().terms) {
    cost[term.var] += maximize ? -term.coef : term.coef;
    constant += term.coef * shift[term.var];
  }
  std::vector<char> usable(cols, 1);
  for (int i = 0; i < m; ++i) usable[n + slacks + i] = 0;
  if (!run(cost, usable)) return {SolveStatus::unbounded, 0.0};
  std::vector<double> x(cols, 0.0);
  for (int i = 0; i < m; ++i) x[basis[i]] = t[i][cols];
  double obj = constant;
  for (const auto& term : p.objective().terms) obj += term.coef * x[term.var];
  return {SolveStatus::optimal, obj};
}

struct MilpOracleResult {
  crossflow::milp::SolveStatus status = crossflow::milp::SolveStatus::infeasible;
  double objective = 0.0;
};

// Enumerates every binary assignment; each leaf's continuous part goes to the
// supplied LP solver.
template <typename LeafSolver>
MilpOracleResult brute_force_binaries(const MilpProblem& p, LeafSolver&& solve_leaf) {
  std::vector<int> bins;
  for (int j = 0; j < p.num_variables(); ++j) {
    if (p.variables()[j].integrality == crossflow::milp::Integrality::binary) bins.push_back(j);
  }
  const bool maximize = p.objective().sense == crossflow::milp::ObjectiveSense::maximize;
  MilpOracleResult best;
  bool found = false;
  for (long mask = 0; mask < (1L << bins.size()); ++mask) {
    MilpProblem leaf = p;
    bool ok = true;
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      const auto& def = p.variables()[bins[k]];
      if (v < def.lower || v > def.upper) {
        ok = false;
        break;
      }
      leaf.set_bounds(bins[k], v, v);
    }
    if (!ok) continue;
    const auto sol = solve_leaf(leaf);
    if (sol.status == crossflow::milp::SolveStatus::unbounded) {
      return {crossflow::milp::SolveStatus::unbounded, 0.0};
    }
    if (sol.status != crossflow::milp::SolveStatus::optimal) continue;
    if (!found || (maximize ? sol.objective > best.objective : sol.objective < best.objective)) {
      best = {crossflow::milp::SolveStatus::optimal, sol.objective};
      found = true;
    }
  }
  return best;
}

// Random instance: up to `max_bin` binaries and `max_cont` continuous
// variables in [0, 10], up to `max_rows` rows, integer coefficients in [-10, 10].
inline MilpProblem random_problem(std::mt19937_64& rng, int max_bin, int max_cont, int max_rows) {
  std::uniform_int_distribution<int> coef(-10, 10);
  std::uniform_int_distribution<int> nb(0, max_bin);
  std::uniform_int_distribution<int> nc(max_bin == 0 ? 1 : 0, max_cont);
  std::uniform_int_distribution<int> nr(1, max_rows);
  std::uniform_int_distribution<int> sense(0, 5);
  std::uniform_int_distribution<int> coin(0, 1);
  MilpProblem p;
  const int bins = nb(rng);
  int conts = nc(rng);
  if (bins + conts == 0) conts = 1;
  for (int j = 0; j < bins; ++j) p.add_binary();
  for (int j = 0; j < conts; ++j) p.add_continuous(0.0, 10.0);
  const int n = bins + conts;
  std::uniform_int_distribution<int> var(0, n - 1);
  const int rows = nr(rng);
  for (int i = 0; i < rows; ++i) {
    std::vector<crossflow::milp::Term> terms;
    for (int j = 0; j < n; ++j) {
      if (coin(rng) || n <= 2) terms.push_back({j, static_cast<double>(coef(rng))});
    }
    if (terms.empty()) terms.push_back({var(rng), static_cast<double>(coef(rng))});
    const int s = sense(rng);
    const auto sn = s < 3 ? crossflow::milp::Sense::less_equal
                          : (s < 5 ? crossflow::milp::Sense::greater_equal : crossflow::milp::Sense::equal);
    std::uniform_int_distribution<int> rhs(-10, 30);
    p.add_constraint(std::move(terms), sn, static_cast<double>(rhs(rng)));
  }
  std::vector<crossflow::milp::Term> obj;
  for (int j = 0; j < n; ++j) obj.push_back({j, static_cast<double>(coef(rng))});
  p.set_objective(coin(rng) ? crossflow::milp::ObjectiveSense::maximize : crossflow::milp::ObjectiveSense::minimize,
                  std::move(obj));
  return p;
}

}  // namespace oracle
