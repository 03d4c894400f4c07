#pragma once

// Small-scale mixed-integer linear programming: problem representation, a
// bundled bounded dual simplex for LP relaxations, best-first branch and bound
// over binary variables, and a feasibility checker.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crossflow::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Integrality { continuous, binary };

struct VariableDef {
  double lower = 0.0;
  double upper = kInf;
  Integrality integrality = Integrality::continuous;
  std::string name;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

enum class Sense { less_equal, greater_equal, equal };

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
  std::string name;
};

enum class ObjectiveSense { minimize, maximize };

struct Objective {
  ObjectiveSense sense = ObjectiveSense::minimize;
  std::vector<Term> terms;
  double constant = 0.0;
};

class MilpProblem {
 public:
  // Returns the new variable's index. Throws std::invalid_argument when
  // lower > upper, or for a binary whose bounds are not within [0, 1].
  int add_variable(VariableDef def);
  int add_continuous(double lower, double upper, std::string name = {});
  int add_binary(std::string name = {});

  // Duplicate indices are merged; zero coefficients are dropped. Throws
  // std::invalid_argument for an index that is not a declared variable.
  int add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name = {});

  void set_objective(ObjectiveSense sense, std::vector<Term> terms, double constant = 0.0);

  // Used by branch and bound; tightening is expected, not checked.
  void set_bounds(int var, double lower, double upper);

  const std::vector<VariableDef>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const Objective& objective() const { return objective_; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int num_binaries() const;

  // Full structural check: at least one variable, all indices declared,
  // bounds ordered, binaries within [0, 1]. Throws std::invalid_argument.
  void validate() const;

 private:
  std::vector<VariableDef> variables_;
  std::vector<LinearConstraint> constraints_;
  Objective objective_;
};

enum class SolveStatus { optimal, infeasible, unbounded, limit_reached };

const char* to_string(SolveStatus status);

enum class BasisStatus : std::uint8_t { basic, at_lower, at_upper, at_zero };

/// Simplex basis over structural variables followed by one logical per row.
struct Basis {
  std::vector<BasisStatus> status;
  int num_variables = 0;
  int num_constraints = 0;
};

struct SolverOptions {
  double feasibility_tol = 1e-6;
  double integrality_tol = 1e-5;
  long max_nodes = 1'000'000;
  std::optional<double> time_limit;  // seconds
  // Branch and bound stops once the open-node bound is within
  // max(absolute_gap, relative_gap * |incumbent|) of the incumbent.
  double absolute_gap = 1e-9;
  double relative_gap = 0.0;
  // Optional starting basis for the root relaxation; ignored when its
  // dimensions do not match the problem.
  const Basis* warm_start = nullptr;
  // After branching, continue with the child on the rounding side before
  // returning to the best open node.
  bool plunge = false;
  // (variable, value) pairs for binaries, tried once after the root
  // relaxation: the listed binaries are fixed, the rest are rounded from the
  // relaxation that results, and a feasible outcome becomes the first
  // incumbent. Throws std::invalid_argument for a non-binary variable.
  std::vector<std::pair<int, double>> incumbent_hint;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> values;
  double objective = 0.0;
  long node_count = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;  // seconds
  double best_bound = 0.0;
  double root_bound = 0.0;  // objective of the root relaxation
  // Final basis of the root relaxation, reusable as a warm start for a
  // problem with the same shape.
  std::optional<Basis> root_basis;
};

// Drops integrality and solves the continuous relaxation.
MilpSolution solve_lp_relaxation(const MilpProblem& problem, const SolverOptions& opts = {});

// Best-first branch and bound with pseudocost branching. Incumbents come from
// integral node relaxations and the optional hint.
MilpSolution solve_milp(const MilpProblem& problem, const SolverOptions& opts = {});

struct Violation {
  enum class Kind { constraint, lower_bound, upper_bound, integrality };
  Kind kind = Kind::constraint;
  int index = 0;  // constraint index or variable index
  double magnitude = 0.0;
  std::string describe() const;
};

// Every constraint, bound and integrality violation larger than tol. Throws
// std::invalid_argument when values.size() differs from the variable count.
std::vector<Violation> check_feasibility(const MilpProblem& problem, std::span<const double> values,
                                         double tol);

// Text dump in LP-style sections (objective, constraints, bounds, binaries).
void write_lp(const MilpProblem& problem, std::ostream& out);

}  // namespace crossflow::milp
