#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "crossflow/milp.hpp"

namespace crossflow::milp {

namespace {

void check_bounds(double lower, double upper, const std::string& what) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    std::ostringstream msg;
    msg << what << ": lower bound " << lower << " exceeds upper bound " << upper;
    throw std::invalid_argument(msg.str());
  }
}

std::vector<Term> merge_terms(std::vector<Term> terms, int num_vars, const char* where) {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_vars) {
      throw std::invalid_argument(std::string(where) + ": term references undeclared variable " +
                                  std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) {
      throw std::invalid_argument(std::string(where) + ": non-finite coefficient");
    }
  }
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  return merged;
}

}  // namespace

int MilpProblem::add_variable(VariableDef def) {
  check_bounds(def.lower, def.upper, "variable " + std::to_string(variables_.size()));
  if (def.integrality == Integrality::binary && (def.lower < 0.0 || def.upper > 1.0)) {
    throw std::invalid_argument("binary variable bounds must lie within [0, 1]");
  }
  variables_.push_back(std::move(def));
  return static_cast<int>(variables_.size()) - 1;
}

int MilpProblem::add_continuous(double lower, double upper, std::string name) {
  return add_variable({lower, upper, Integrality::continuous, std::move(name)});
}

int MilpProblem::add_binary(std::string name) {
  return add_variable({0.0, 1.0, Integrality::binary, std::move(name)});
}

int MilpProblem::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string name) {
  if (std::isnan(rhs)) throw std::invalid_argument("constraint right-hand side is NaN");
  constraints_.push_back({merge_terms(std::move(terms), num_variables(), "constraint"), sense, rhs,
                          std::move(name)});
  return static_cast<int>(constraints_.size()) - 1;
}

void MilpProblem::set_objective(ObjectiveSense sense, std::vector<Term> terms, double constant) {
  objective_ = {sense, merge_terms(std::move(terms), num_variables(), "objective"), constant};
}

void MilpProblem::set_bounds(int var, double lower, double upper) {
  if (var < 0 || var >= num_variables()) throw std::invalid_argument("set_bounds: no such variable");
  check_bounds(lower, upper, "variable " + std::to_string(var));
  variables_[var].lower = lower;
  variables_[var].upper = upper;
}

int MilpProblem::num_binaries() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(), [](const VariableDef& v) {
    return v.integrality == Integrality::binary;
  }));
}

void MilpProblem::validate() const {
  if (variables_.empty()) throw std::invalid_argument("problem has no variables");
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    const auto& v = variables_[j];
    check_bounds(v.lower, v.upper, "variable " + std::to_string(j));
    if (v.integrality == Integrality::binary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw std::invalid_argument("binary variable " + std::to_string(j) + " has bounds outside [0, 1]");
    }
  }
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    int last = -1;
    for (const Term& t : terms) {
      if (t.var < 0 || t.var >= num_variables()) {
        throw std::invalid_argument(where + " references undeclared variable " + std::to_string(t.var));
      }
      if (t.var <= last) throw std::invalid_argument(where + " has duplicate or unsorted terms");
      last = t.var;
    }
  };
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    check_terms(constraints_[i].terms, "constraint " + std::to_string(i));
  }
  check_terms(objective_.terms, "objective");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::limit_reached: return "limit-reached";
  }
  return "unknown";
}

std::string Violation::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::constraint: out << "constraint " << index; break;
    case Kind::lower_bound: out << "lower bound of variable " << index; break;
    case Kind::upper_bound: out << "upper bound of variable " << index; break;
    case Kind::integrality: out << "integrality of variable " << index; break;
  }
  out << " violated by " << magnitude;
  return out.str();
}

std::vector<Violation> check_feasibility(const MilpProblem& problem, std::span<const double> values,
                                         double tol) {
  if (static_cast<int>(values.size()) != problem.num_variables()) {
    throw std::invalid_argument("check_feasibility: expected " + std::to_string(problem.num_variables()) +
                                " values, got " + std::to_string(values.size()));
  }
  std::vector<Violation> report;
  const auto& vars = problem.variables();
  for (int j = 0; j < problem.num_variables(); ++j) {
    const double x = values[j];
    if (vars[j].lower - x > tol) report.push_back({Violation::Kind::lower_bound, j, vars[j].lower - x});
    if (x - vars[j].upper > tol) report.push_back({Violation::Kind::upper_bound, j, x - vars[j].upper});
    if (vars[j].integrality == Integrality::binary) {
      const double frac = std::abs(x - std::round(x));
      if (frac > tol) report.push_back({Violation::Kind::integrality, j, frac});
    }
  }
  const auto& rows = problem.constraints();
  for (int i = 0; i < problem.num_constraints(); ++i) {
    double activity = 0.0;
    for (const Term& t : rows[i].terms) activity += t.coef * values[t.var];
    double excess = 0.0;
    switch (rows[i].sense) {
      case Sense::less_equal: excess = activity - rows[i].rhs; break;
      case Sense::greater_equal: excess = rows[i].rhs - activity; break;
      case Sense::equal: excess = std::abs(activity - rows[i].rhs); break;
    }
    if (excess > tol) report.push_back({Violation::Kind::constraint, i, excess});
  }
  return report;
}

namespace {

bool valid_lp_name(const std::string& name) {
  if (name.empty() || name.size() > 200) return false;
  if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

std::string fixed(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(9) << v;
  return out.str();
}

}  // namespace

void write_lp(const MilpProblem& problem, std::ostream& out) {
  const auto& vars = problem.variables();
  std::vector<std::string> names(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    names[j] = valid_lp_name(vars[j].name) ? vars[j].name : "x" + std::to_string(j);
  }
  auto write_terms = [&](const std::vector<Term>& terms) {
    if (terms.empty()) out << " 0 " << names.front();
    for (const Term& t : terms) {
      out << ' ' << (t.coef < 0.0 ? "- " : "+ ") << fixed(std::abs(t.coef)) << ' ' << names[t.var];
    }
  };

  out << "\\ crossflow MILP dump: " << vars.size() << " variables, " << problem.num_constraints()
      << " constraints, " << problem.num_binaries() << " binaries\n";
  const Objective& obj = problem.objective();
  out << (obj.sense == ObjectiveSense::maximize ? "Maximize\n" : "Minimize\n") << " obj:";
  write_terms(obj.terms);
  if (obj.constant != 0.0) out << ' ' << (obj.constant < 0.0 ? "- " : "+ ") << fixed(std::abs(obj.constant));
  out << "\nSubject To\n";
  const auto& rows = problem.constraints();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << ' ' << (valid_lp_name(rows[i].name) ? rows[i].name : "c" + std::to_string(i)) << ':';
    write_terms(rows[i].terms);
    switch (rows[i].sense) {
      case Sense::less_equal: out << " <= "; break;
      case Sense::greater_equal: out << " >= "; break;
      case Sense::equal: out << " = "; break;
    }
    out << fixed(rows[i].rhs) << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const auto& v = vars[j];
    if (v.integrality == Integrality::binary && v.lower == 0.0 && v.upper == 1.0) continue;
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << ' ' << names[j] << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << names[j] << " = " << fixed(v.lower) << '\n';
    } else {
      out << ' ' << (std::isinf(v.lower) ? std::string("-inf") : fixed(v.lower)) << " <= " << names[j] << " <= "
          << (std::isinf(v.upper) ? std::string("+inf") : fixed(v.upper)) << '\n';
    }
  }
  out << "Binaries\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].integrality == Integrality::binary) out << ' ' << names[j] << '\n';
  }
  out << "End\n";
}

}  // namespace crossflow::milp
