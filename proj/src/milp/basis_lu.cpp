#include "milp/basis_lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

namespace crossflow::milp::detail {

namespace {

constexpr double kSingletonTol = 1e-11;
constexpr double kNucleusTol = 1e-11;

}  // namespace

bool BasisLu::factor(int m, const std::vector<int>& start, const std::vector<int>& rows,
                     const std::vector<double>& values) {
  m_ = m;
  pivots_.clear();
  etas_.clear();
  nucleus_rows_.clear();
  nucleus_cols_.clear();
  work_.assign(m, 0.0);

  std::vector<int> row_start(m + 1, 0);
  for (int k = 0; k < start[m]; ++k) ++row_start[rows[k] + 1];
  for (int i = 0; i < m; ++i) row_start[i + 1] += row_start[i];
  std::vector<int> row_cols(start[m]);
  std::vector<double> row_vals(start[m]);
  {
    std::vector<int> fill(row_start.begin(), row_start.end() - 1);
    for (int c = 0; c < m; ++c) {
      for (int k = start[c]; k < start[c + 1]; ++k) {
        row_cols[fill[rows[k]]] = c;
        row_vals[fill[rows[k]]++] = values[k];
      }
    }
  }

  std::vector<int> col_count(m), row_count(m);
  std::vector<char> col_active(m, 1), row_active(m, 1);
  std::vector<int> col_queue, row_queue;
  for (int c = 0; c < m; ++c) {
    col_count[c] = start[c + 1] - start[c];
    if (col_count[c] == 1) col_queue.push_back(c);
  }
  for (int i = 0; i < m; ++i) {
    row_count[i] = row_start[i + 1] - row_start[i];
    if (row_count[i] == 1) row_queue.push_back(i);
  }

  while (true) {
    if (!col_queue.empty()) {
      const int c = col_queue.back();
      col_queue.pop_back();
      if (!col_active[c] || col_count[c] != 1) continue;
      int r = -1;
      double v = 0.0;
      for (int k = start[c]; k < start[c + 1]; ++k) {
        if (row_active[rows[k]]) {
          r = rows[k];
          v = values[k];
        }
      }
      if (std::abs(v) < kSingletonTol) continue;
      Pivot p{r, c, v, false, static_cast<int>(etas_.size()), 0};
      col_active[c] = 0;
      row_active[r] = 0;
      for (int k = row_start[r]; k < row_start[r + 1]; ++k) {
        const int j = row_cols[k];
        if (!col_active[j]) continue;
        etas_.push_back({j, row_vals[k]});
        if (--col_count[j] == 1) col_queue.push_back(j);
      }
      p.end = static_cast<int>(etas_.size());
      pivots_.push_back(p);
      continue;
    }
    if (!row_queue.empty()) {
      const int r = row_queue.back();
      row_queue.pop_back();
      if (!row_active[r] || row_count[r] != 1) continue;
      int c = -1;
      double v = 0.0;
      for (int k = row_start[r]; k < row_start[r + 1]; ++k) {
        if (col_active[row_cols[k]]) {
          c = row_cols[k];
          v = row_vals[k];
        }
      }
      if (std::abs(v) < kSingletonTol) continue;
      Pivot p{r, c, v, true, static_cast<int>(etas_.size()), 0};
      col_active[c] = 0;
      row_active[r] = 0;
      for (int k = start[c]; k < start[c + 1]; ++k) {
        const int i = rows[k];
        if (!row_active[i]) continue;
        etas_.push_back({i, values[k] / v});
        if (--row_count[i] == 1) row_queue.push_back(i);
      }
      p.end = static_cast<int>(etas_.size());
      pivots_.push_back(p);
      continue;
    }
    break;
  }

  for (int i = 0; i < m; ++i) {
    if (row_active[i]) nucleus_rows_.push_back(i);
  }
  for (int c = 0; c < m; ++c) {
    if (col_active[c]) nucleus_cols_.push_back(c);
  }
  const int k = static_cast<int>(nucleus_rows_.size());
  if (k == 0) return true;

  std::vector<int> local_row(m, -1);
  for (int i = 0; i < k; ++i) local_row[nucleus_rows_[i]] = i;
  nucleus_work_.resize(k);
  sparse_nucleus_ = k > kDenseNucleusLimit;
  if (!sparse_nucleus_) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(k, k);
    for (int lc = 0; lc < k; ++lc) {
      const int c = nucleus_cols_[lc];
      for (int e = start[c]; e < start[c + 1]; ++e) {
        if (local_row[rows[e]] >= 0) dense(local_row[rows[e]], lc) = values[e];
      }
    }
    nucleus_lu_.compute(dense);
    const auto diag = nucleus_lu_.matrixLU().diagonal().cwiseAbs();
    return diag.minCoeff() > kNucleusTol * std::max(1.0, diag.maxCoeff());
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (int lc = 0; lc < k; ++lc) {
    const int c = nucleus_cols_[lc];
    for (int e = start[c]; e < start[c + 1]; ++e) {
      if (local_row[rows[e]] >= 0) triplets.emplace_back(local_row[rows[e]], lc, values[e]);
    }
  }
  Eigen::SparseMatrix<double> sparse(k, k);
  sparse.setFromTriplets(triplets.begin(), triplets.end());
  sparse.makeCompressed();
  sparse_lu_.compute(sparse);
  if (sparse_lu_.info() != Eigen::Success) return false;
  // The diagonal of U lives in the supernodes of L.
  const auto& supernodes = sparse_lu_.matrixL().m_mapL;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int j = 0; j < k; ++j) {
    double d = 0.0;
    for (std::remove_cvref_t<decltype(supernodes)>::InnerIterator it(supernodes, j); it; ++it) {
      if (it.index() == j) {
        d = std::abs(it.value());
        break;
      }
    }
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return lo > kNucleusTol * std::max(1.0, hi);
}

void BasisLu::ftran(std::vector<double>& v) const {
  std::copy(v.begin(), v.end(), work_.begin());
  for (const Pivot& p : pivots_) {
    if (!p.row_singleton) continue;
    const double t = work_[p.row];
    if (t == 0.0) continue;
    for (int e = p.begin; e < p.end; ++e) work_[etas_[e].index] -= etas_[e].value * t;
  }
  const int k = static_cast<int>(nucleus_rows_.size());
  if (k > 0) {
    for (int i = 0; i < k; ++i) nucleus_work_[i] = work_[nucleus_rows_[i]];
    if (sparse_nucleus_) {
      nucleus_work_ = sparse_lu_.solve(nucleus_work_).eval();
    } else {
      nucleus_work_ = nucleus_lu_.solve(nucleus_work_);
    }
    for (int i = 0; i < k; ++i) v[nucleus_cols_[i]] = nucleus_work_[i];
  }
  for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
    double s = work_[it->row];
    if (!it->row_singleton) {
      for (int e = it->begin; e < it->end; ++e) s -= etas_[e].value * v[etas_[e].index];
    }
    v[it->col] = s / it->value;
  }
}

void BasisLu::btran(std::vector<double>& v) const {
  std::copy(v.begin(), v.end(), work_.begin());
  for (const Pivot& p : pivots_) {
    const double w = work_[p.col] / p.value;
    v[p.row] = w;
    if (p.row_singleton || w == 0.0) continue;
    for (int e = p.begin; e < p.end; ++e) work_[etas_[e].index] -= etas_[e].value * w;
  }
  const int k = static_cast<int>(nucleus_rows_.size());
  if (k > 0) {
    for (int i = 0; i < k; ++i) nucleus_work_[i] = work_[nucleus_cols_[i]];
    if (sparse_nucleus_) {
      nucleus_work_ = sparse_lu_.transpose().solve(nucleus_work_).eval();
    } else {
      nucleus_work_ = nucleus_lu_.transpose().solve(nucleus_work_);
    }
    for (int i = 0; i < k; ++i) v[nucleus_rows_[i]] = nucleus_work_[i];
  }
  for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
    if (!it->row_singleton) continue;
    double y = v[it->row];
    for (int e = it->begin; e < it->end; ++e) y -= etas_[e].value * v[etas_[e].index];
    v[it->row] = y;
  }
}

}  // namespace crossflow::milp::detail
