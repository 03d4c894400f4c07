#include "milp/dual_simplex.hpp"

#include <algorithm>
#include <cmath>

namespace crossflow::milp::detail {

namespace {

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kArtificialLimit = 1e13;
constexpr int kDegenerateBeforeBland = 50;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

LpData LpData::from_problem(const MilpProblem& problem) {
  LpData lp;
  lp.n = problem.num_variables();
  lp.m = problem.num_constraints();
  const auto& rows = problem.constraints();

  lp.row_start.assign(lp.m + 1, 0);
  std::vector<int> col_count(lp.n, 0);
  for (int i = 0; i < lp.m; ++i) {
    lp.row_start[i + 1] = lp.row_start[i] + static_cast<int>(rows[i].terms.size());
    for (const Term& t : rows[i].terms) ++col_count[t.var];
  }
  lp.col_index.resize(lp.row_start.back());
  lp.row_value.resize(lp.row_start.back());
  lp.col_start.assign(lp.n + 1, 0);
  for (int j = 0; j < lp.n; ++j) lp.col_start[j + 1] = lp.col_start[j] + col_count[j];
  lp.row_index.resize(lp.col_start.back());
  lp.col_value.resize(lp.col_start.back());
  std::vector<int> fill(lp.col_start.begin(), lp.col_start.end() - 1);
  lp.row_lower.resize(lp.m);
  lp.row_upper.resize(lp.m);
  for (int i = 0; i < lp.m; ++i) {
    int k = lp.row_start[i];
    for (const Term& t : rows[i].terms) {
      lp.col_index[k] = t.var;
      lp.row_value[k] = t.coef;
      ++k;
      lp.row_index[fill[t.var]] = i;
      lp.col_value[fill[t.var]] = t.coef;
      ++fill[t.var];
    }
    switch (rows[i].sense) {
      case Sense::less_equal: lp.row_lower[i] = -kInf; lp.row_upper[i] = rows[i].rhs; break;
      case Sense::greater_equal: lp.row_lower[i] = rows[i].rhs; lp.row_upper[i] = kInf; break;
      case Sense::equal: lp.row_lower[i] = lp.row_upper[i] = rows[i].rhs; break;
    }
  }

  lp.objective_sign = problem.objective().sense == ObjectiveSense::maximize ? -1.0 : 1.0;
  lp.cost.assign(lp.n, 0.0);
  for (const Term& t : problem.objective().terms) lp.cost[t.var] = lp.objective_sign * t.coef;
  lp.col_lower.resize(lp.n);
  lp.col_upper.resize(lp.n);
  for (int j = 0; j < lp.n; ++j) {
    lp.col_lower[j] = problem.variables()[j].lower;
    lp.col_upper[j] = problem.variables()[j].upper;
  }
  return lp;
}

DualSimplex::DualSimplex(const LpData& lp) : lp_(lp), n_(lp.n), m_(lp.m), total_(lp.n + lp.m) {
  lower_.resize(total_);
  upper_.resize(total_);
  cost_.assign(total_, 0.0);
  for (int j = 0; j < n_; ++j) cost_[j] = lp.cost[j];
  reset_col_bounds();
  for (int i = 0; i < m_; ++i) {
    lower_[n_ + i] = lp.row_lower[i];
    upper_[n_ + i] = lp.row_upper[i];
  }
  nb_lower_ = lower_;
  nb_upper_ = upper_;
  artificial_.assign(total_, 0);
  x_.assign(total_, 0.0);
  d_.assign(total_, 0.0);
  alpha_row_.assign(total_, 0.0);
  alpha_mark_.assign(total_, 0);
  load_slack_basis();
}

void DualSimplex::set_col_bounds(int j, double lower, double upper) {
  lower_[j] = lower;
  upper_[j] = upper;
}

void DualSimplex::reset_col_bounds() {
  for (int j = 0; j < n_; ++j) {
    lower_[j] = lp_.col_lower[j];
    upper_[j] = lp_.col_upper[j];
  }
}

void DualSimplex::load_slack_basis() {
  status_.assign(total_, BasisStatus::at_lower);
  head_.resize(m_);
  row_of_.assign(total_, -1);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    status_[n_ + i] = BasisStatus::basic;
    row_of_[n_ + i] = i;
  }
  dse_.assign(m_, 1.0);
  etas_.clear();
  factored_ = false;
}

bool DualSimplex::load_basis(const Basis& basis) {
  if (basis.num_variables != n_ || basis.num_constraints != m_ ||
      static_cast<int>(basis.status.size()) != total_) {
    return false;
  }
  if (std::count(basis.status.begin(), basis.status.end(), BasisStatus::basic) != m_) return false;
  auto saved_status = status_;
  auto saved_head = head_;
  auto saved_row_of = row_of_;
  status_ = basis.status;
  row_of_.assign(total_, -1);
  int r = 0;
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == BasisStatus::basic) {
      head_[r] = j;
      row_of_[j] = r;
      ++r;
    }
  }
  etas_.clear();
  if (!factor()) {
    status_ = std::move(saved_status);
    head_ = std::move(saved_head);
    row_of_ = std::move(saved_row_of);
    factored_ = false;
    return false;
  }
  dse_.assign(m_, 1.0);
  return true;
}

bool DualSimplex::load_basis(const Basis& basis, const std::vector<double>& weights) {
  if (!load_basis(basis)) return false;
  if (static_cast<int>(weights.size()) == total_) {
    for (int r = 0; r < m_; ++r) dse_[r] = weights[head_[r]];
  }
  return true;
}

Basis DualSimplex::basis() const { return Basis{status_, n_, m_}; }

std::vector<double> DualSimplex::pricing_weights() const {
  std::vector<double> out(total_, 1.0);
  for (int r = 0; r < m_; ++r) out[head_[r]] = dse_[r];
  return out;
}

bool DualSimplex::factor() {
  basis_start_.assign(m_ + 1, 0);
  basis_rows_.clear();
  basis_values_.clear();
  for (int r = 0; r < m_; ++r) {
    const int j = head_[r];
    if (j >= n_) {
      basis_rows_.push_back(j - n_);
      basis_values_.push_back(-1.0);
    } else {
      for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
        basis_rows_.push_back(lp_.row_index[k]);
        basis_values_.push_back(lp_.col_value[k]);
      }
    }
    basis_start_[r + 1] = static_cast<int>(basis_rows_.size());
  }
  etas_.clear();
  factored_ = lu_.factor(m_, basis_start_, basis_rows_, basis_values_);
  return factored_;
}

void DualSimplex::ftran(std::vector<double>& v) const {
  if (m_ == 0) return;
  lu_.ftran(v);
  const int count = etas_.size();
  for (int e = 0; e < count; ++e) {
    const int r = etas_.row[e];
    const double xr = v[r] / etas_.pivot[e];
    if (xr != 0.0) {
      for (int k = etas_.start[e]; k < etas_.start[e + 1]; ++k) v[etas_.index[k]] -= etas_.value[k] * xr;
    }
    v[r] = xr;
  }
}

void DualSimplex::btran(std::vector<double>& v) const {
  if (m_ == 0) return;
  for (int e = etas_.size() - 1; e >= 0; --e) {
    const int r = etas_.row[e];
    double acc = v[r];
    for (int k = etas_.start[e]; k < etas_.start[e + 1]; ++k) acc -= etas_.value[k] * v[etas_.index[k]];
    v[r] = acc / etas_.pivot[e];
  }
  lu_.btran(v);
}

void DualSimplex::load_column(int j, std::vector<double>& out) const {
  out.assign(m_, 0.0);
  if (j >= n_) {
    out[j - n_] = -1.0;
    return;
  }
  for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) out[lp_.row_index[k]] = lp_.col_value[k];
}

double DualSimplex::nonbasic_value(int j) const {
  switch (status_[j]) {
    case BasisStatus::at_lower: return nb_lower_[j];
    case BasisStatus::at_upper: return nb_upper_[j];
    case BasisStatus::at_zero: return 0.0;
    case BasisStatus::basic: break;
  }
  return x_[j];
}

void DualSimplex::compute_primal() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == BasisStatus::basic) continue;
    const double v = nonbasic_value(j);
    x_[j] = v;
    if (v == 0.0) continue;
    if (j >= n_) {
      rhs[j - n_] += v;  // logical column is -e_i, moved to the right-hand side
    } else {
      for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) rhs[lp_.row_index[k]] -= lp_.col_value[k] * v;
    }
  }
  ftran(rhs);
  for (int r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
}

void DualSimplex::compute_duals() {
  std::vector<double> y(m_);
  for (int r = 0; r < m_; ++r) y[r] = cost_[head_[r]];
  btran(y);
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == BasisStatus::basic) {
      d_[j] = 0.0;
    } else if (j >= n_) {
      d_[j] = y[j - n_];
    } else {
      double dj = cost_[j];
      for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) dj -= lp_.col_value[k] * y[lp_.row_index[k]];
      d_[j] = dj;
    }
  }
}

void DualSimplex::make_dual_feasible() {
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == BasisStatus::basic) continue;
    const double lo = lower_[j];
    const double hi = upper_[j];
    nb_lower_[j] = lo;
    nb_upper_[j] = hi;
    artificial_[j] = 0;
    if (lo == hi) {
      status_[j] = BasisStatus::at_lower;
      continue;
    }
    const double dj = d_[j];
    if (dj > kDualTol) {
      status_[j] = BasisStatus::at_lower;
      if (!finite(lo)) {
        nb_lower_[j] = (finite(hi) ? std::min(hi, 0.0) : 0.0) - artificial_scale_;
        artificial_[j] = 1;
      }
    } else if (dj < -kDualTol) {
      status_[j] = BasisStatus::at_upper;
      if (!finite(hi)) {
        nb_upper_[j] = (finite(lo) ? std::max(lo, 0.0) : 0.0) + artificial_scale_;
        artificial_[j] = 1;
      }
    } else if (status_[j] == BasisStatus::at_lower && finite(lo)) {
    } else if (status_[j] == BasisStatus::at_upper && finite(hi)) {
    } else if (finite(lo)) {
      status_[j] = BasisStatus::at_lower;
    } else if (finite(hi)) {
      status_[j] = BasisStatus::at_upper;
    } else {
      status_[j] = BasisStatus::at_zero;
    }
  }
}

bool DualSimplex::has_artificial() const {
  for (int j = 0; j < total_; ++j) {
    if (artificial_[j] && status_[j] != BasisStatus::basic) return true;
  }
  return false;
}

// Moves artificially bounded nonbasic variables: zero reduced cost ones to a
// real bound, the rest further out. False once the box exceeds the limit.
bool DualSimplex::relax_artificial_bounds() {
  bool expand = false;
  for (int j = 0; j < total_; ++j) {
    if (!artificial_[j] || status_[j] == BasisStatus::basic) continue;
    if (std::abs(d_[j]) <= kDualTol) {
      artificial_[j] = 0;
      nb_lower_[j] = lower_[j];
      nb_upper_[j] = upper_[j];
      if (finite(lower_[j])) {
        status_[j] = BasisStatus::at_lower;
      } else if (finite(upper_[j])) {
        status_[j] = BasisStatus::at_upper;
      } else {
        status_[j] = BasisStatus::at_zero;
      }
    } else {
      expand = true;
    }
  }
  if (expand) {
    artificial_scale_ *= 1e3;
    if (artificial_scale_ > kArtificialLimit) return false;
    for (int j = 0; j < total_; ++j) {
      if (!artificial_[j] || status_[j] == BasisStatus::basic) continue;
      if (status_[j] == BasisStatus::at_lower) {
        nb_lower_[j] = (finite(upper_[j]) ? std::min(upper_[j], 0.0) : 0.0) - artificial_scale_;
      } else {
        nb_upper_[j] = (finite(lower_[j]) ? std::max(lower_[j], 0.0) : 0.0) + artificial_scale_;
      }
    }
  }
  compute_primal();
  return true;
}

double DualSimplex::primal_tolerance(double bound) const { return 1e-9 * std::max(1.0, std::abs(bound)); }

int DualSimplex::choose_leaving_row(bool bland) const {
  int best = -1;
  double best_score = 0.0;
  int best_var = total_;
  for (int r = 0; r < m_; ++r) {
    const int j = head_[r];
    const double v = x_[j];
    double infeas = 0.0;
    if (v < lower_[j] - primal_tolerance(lower_[j])) {
      infeas = lower_[j] - v;
    } else if (v > upper_[j] + primal_tolerance(upper_[j])) {
      infeas = v - upper_[j];
    } else {
      continue;
    }
    if (bland) {
      if (j < best_var) {
        best_var = j;
        best = r;
      }
    } else {
      const double score = infeas * infeas / dse_[r];
      if (score > best_score) {
        best_score = score;
        best = r;
      }
    }
  }
  return best;
}

void DualSimplex::compute_pivot_row(const std::vector<double>& rho) {
  for (int j : alpha_touched_) {
    alpha_row_[j] = 0.0;
    alpha_mark_[j] = 0;
  }
  alpha_touched_.clear();
  auto touch = [&](int j) {
    if (!alpha_mark_[j]) {
      alpha_mark_[j] = 1;
      alpha_touched_.push_back(j);
    }
  };
  for (int i = 0; i < m_; ++i) {
    const double ri = rho[i];
    if (ri == 0.0) continue;
    touch(n_ + i);
    alpha_row_[n_ + i] = -ri;
    for (int k = lp_.row_start[i]; k < lp_.row_start[i + 1]; ++k) {
      const int j = lp_.col_index[k];
      touch(j);
      alpha_row_[j] += ri * lp_.row_value[k];
    }
  }
}

int DualSimplex::ratio_test(int /*r*/, bool leaving_to_lower, bool bland) const {
  const double s = leaving_to_lower ? -1.0 : 1.0;
  auto eligible = [&](int j, double& numer, double& denom) {
    if (status_[j] == BasisStatus::basic || lower_[j] == upper_[j]) return false;
    const double a = alpha_row_[j];
    if (std::abs(a) <= kPivotTol) return false;
    switch (status_[j]) {
      case BasisStatus::at_lower:
        if (s * a <= 0.0) return false;
        numer = std::max(d_[j], 0.0);
        break;
      case BasisStatus::at_upper:
        if (s * a >= 0.0) return false;
        numer = std::max(-d_[j], 0.0);
        break;
      case BasisStatus::at_zero:
        numer = std::abs(d_[j]);
        break;
      case BasisStatus::basic: return false;
    }
    denom = std::abs(a);
    return true;
  };

  int best = -1;
  if (bland) {
    double best_ratio = kInf;
    for (int j : alpha_touched_) {
      double numer = 0.0, denom = 1.0;
      if (!eligible(j, numer, denom)) continue;
      const double ratio = numer / denom;
      if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && j < best)) {
        if (ratio < best_ratio) best_ratio = ratio;
        best = j;
      }
    }
    return best;
  }

  double bound = kInf;
  for (int j : alpha_touched_) {
    double numer = 0.0, denom = 1.0;
    if (!eligible(j, numer, denom)) continue;
    bound = std::min(bound, (numer + kDualTol) / denom);
  }
  if (!std::isfinite(bound)) return -1;
  double best_alpha = 0.0;
  for (int j : alpha_touched_) {
    double numer = 0.0, denom = 1.0;
    if (!eligible(j, numer, denom)) continue;
    if (numer / denom > bound) continue;
    if (denom > best_alpha || (denom == best_alpha && j < best)) {
      best_alpha = denom;
      best = j;
    }
  }
  return best;
}

double DualSimplex::objective() const {
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
  return obj;
}

LpStatus DualSimplex::solve(long iteration_limit, std::optional<Clock::time_point> deadline) {
  if (!factored_ && !factor()) {
    load_slack_basis();
    if (!factor()) return LpStatus::numerical_failure;
  }
  // Basic variables never carry an artificial bound.
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == BasisStatus::basic) artificial_[j] = 0;
  }
  compute_duals();
  make_dual_feasible();
  compute_primal();

  long iterations = 0;
  bool verified = false;
  int degenerate_run = 0;
  bool bland = false;
  std::vector<double> rho(m_), column(m_), tau(m_);

  while (true) {
    if (etas_.size() >= kRefactorInterval) {
      if (!factor()) return LpStatus::numerical_failure;
      compute_duals();
      make_dual_feasible();
      compute_primal();
    }
    if (iterations >= iteration_limit) return LpStatus::iteration_limit;
    if (deadline && (iterations & 31) == 0 && Clock::now() > *deadline) return LpStatus::time_limit;

    const int r = choose_leaving_row(bland);
    if (r < 0) {
      if (!etas_.empty() && !verified) {
        // Confirm optimality with values recomputed from scratch.
        verified = true;
        compute_duals();
        make_dual_feasible();
        compute_primal();
        continue;
      }
      if (has_artificial()) {
        if (!relax_artificial_bounds()) return LpStatus::unbounded;
        continue;
      }
      return LpStatus::optimal;
    }

    const int leaving = head_[r];
    const bool to_lower = x_[leaving] < lower_[leaving];
    const double target = to_lower ? lower_[leaving] : upper_[leaving];

    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    btran(rho);
    compute_pivot_row(rho);
    const int q = ratio_test(r, to_lower, bland);
    if (q < 0) {
      if (has_artificial()) {
        if (!relax_artificial_bounds()) return LpStatus::infeasible;
        continue;
      }
      if (!etas_.empty()) {
        if (!factor()) return LpStatus::numerical_failure;
        compute_duals();
        make_dual_feasible();
        compute_primal();
        continue;
      }
      return LpStatus::infeasible;
    }

    load_column(q, column);
    ftran(column);
    const double arq = column[r];
    if (std::abs(arq - alpha_row_[q]) > 1e-7 * (1.0 + std::abs(arq)) || std::abs(arq) <= kPivotTol) {
      if (!etas_.empty()) {
        if (!factor()) return LpStatus::numerical_failure;
        compute_duals();
        make_dual_feasible();
        compute_primal();
        continue;
      }
      if (std::abs(arq) <= kPivotTol) return LpStatus::numerical_failure;
    }

    double theta_d = d_[q] / arq;
    if (to_lower ? theta_d > 0.0 : theta_d < 0.0) theta_d = 0.0;
    for (int j : alpha_touched_) {
      if (status_[j] != BasisStatus::basic) d_[j] -= theta_d * alpha_row_[j];
    }
    d_[q] = 0.0;
    d_[leaving] = -theta_d;

    const double delta = x_[leaving] - target;
    const double t = delta / arq;
    const double progress = std::abs(theta_d * delta);

    // Dual steepest-edge weights, updated with tau = B^-1 rho before the basis change.
    tau = rho;
    ftran(tau);
    double w_r = 0.0;
    for (double v : rho) w_r += v * v;
    for (int i = 0; i < m_; ++i) {
      if (i == r || column[i] == 0.0) continue;
      const double kappa = column[i] / arq;
      dse_[i] = std::max(dse_[i] - 2.0 * kappa * tau[i] + kappa * kappa * w_r, 1e-6);
    }
    dse_[r] = std::max(w_r / (arq * arq), 1e-6);

    for (int i = 0; i < m_; ++i) {
      if (column[i] != 0.0) x_[head_[i]] -= t * column[i];
    }
    x_[q] += t;
    x_[leaving] = target;

    status_[leaving] = to_lower ? BasisStatus::at_lower : BasisStatus::at_upper;
    nb_lower_[leaving] = lower_[leaving];
    nb_upper_[leaving] = upper_[leaving];
    artificial_[leaving] = 0;
    row_of_[leaving] = -1;
    status_[q] = BasisStatus::basic;
    artificial_[q] = 0;
    head_[r] = q;
    row_of_[q] = r;

    etas_.row.push_back(r);
    etas_.pivot.push_back(arq);
    for (int i = 0; i < m_; ++i) {
      if (i != r && column[i] != 0.0) {
        etas_.index.push_back(i);
        etas_.value.push_back(column[i]);
      }
    }
    etas_.start.push_back(static_cast<int>(etas_.index.size()));

    ++iterations;
    ++total_iterations_;
    verified = false;
    if (progress <= 1e-12) {
      if (++degenerate_run > kDegenerateBeforeBland) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
  }
}

}  // namespace crossflow::milp::detail
