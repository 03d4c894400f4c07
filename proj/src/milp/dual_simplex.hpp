#pragma once

// Bounded dual simplex over the computational form
//   min c'x  s.t.  A x - y = 0,  l <= x <= u,  L <= y <= U
// where y holds one logical variable per row. The basis matrix is factored
// with a sparse LU and updated in product form between refactorizations.

#include <chrono>
#include <optional>
#include <vector>

#include "crossflow/milp.hpp"
#include "milp/basis_lu.hpp"

namespace crossflow::milp::detail {

struct LpData {
  int n = 0;  // structural columns
  int m = 0;  // rows
  std::vector<int> col_start, row_index;
  std::vector<double> col_value;
  std::vector<int> row_start, col_index;
  std::vector<double> row_value;
  std::vector<double> cost;  // minimization form
  std::vector<double> col_lower, col_upper;
  std::vector<double> row_lower, row_upper;
  double objective_sign = 1.0;  // -1 when the user problem maximizes

  static LpData from_problem(const MilpProblem& problem);
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, time_limit, numerical_failure };

using Clock = std::chrono::steady_clock;

class DualSimplex {
 public:
  explicit DualSimplex(const LpData& lp);

  // Replaces the working bounds of structural column j.
  void set_col_bounds(int j, double lower, double upper);
  void reset_col_bounds();

  // Returns false (and keeps the current basis) when the basis has the wrong
  // shape or is singular.
  bool load_basis(const Basis& basis);
  // As above, also restoring pricing weights saved by pricing_weights().
  bool load_basis(const Basis& basis, const std::vector<double>& weights);
  void load_slack_basis();
  Basis basis() const;
  // Dual steepest-edge weight of every basic variable, indexed by variable.
  std::vector<double> pricing_weights() const;

  LpStatus solve(long iteration_limit, std::optional<Clock::time_point> deadline);

  // Structural values followed by row activities.
  const std::vector<double>& values() const { return x_; }
  double objective() const;  // minimization form, no constant
  long iterations() const { return total_iterations_; }

 private:
  static constexpr int kRefactorInterval = 64;

  // Product-form updates since the last factorization, stored contiguously.
  struct EtaFile {
    std::vector<int> row;
    std::vector<double> pivot;
    std::vector<int> start{0};
    std::vector<int> index;
    std::vector<double> value;

    int size() const { return static_cast<int>(row.size()); }
    bool empty() const { return row.empty(); }
    void clear() {
      row.clear();
      pivot.clear();
      start.assign(1, 0);
      index.clear();
      value.clear();
    }
  };

  bool factor();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void load_column(int j, std::vector<double>& out) const;
  void compute_primal();
  void compute_duals();
  void make_dual_feasible();
  double nonbasic_value(int j) const;
  double primal_tolerance(double bound) const;
  int choose_leaving_row(bool bland) const;
  void compute_pivot_row(const std::vector<double>& rho);
  int ratio_test(int r, bool leaving_to_lower, bool bland) const;
  bool relax_artificial_bounds();
  bool has_artificial() const;

  const LpData& lp_;
  int n_ = 0;
  int m_ = 0;
  int total_ = 0;

  std::vector<double> lower_, upper_;        // true working bounds
  std::vector<double> nb_lower_, nb_upper_;  // bounds used while nonbasic
  std::vector<char> artificial_;
  std::vector<double> cost_;
  std::vector<BasisStatus> status_;
  std::vector<int> head_;
  std::vector<int> row_of_;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<double> dse_;

  std::vector<double> alpha_row_;
  std::vector<int> alpha_touched_;
  std::vector<char> alpha_mark_;

  std::vector<int> basis_start_, basis_rows_;
  std::vector<double> basis_values_;
  BasisLu lu_;
  EtaFile etas_;
  bool factored_ = false;
  double artificial_scale_ = 1e6;
  long total_iterations_ = 0;
};

}  // namespace crossflow::milp::detail
