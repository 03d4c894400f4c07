#pragma once

// LU factorization of a simplex basis. Column and row singletons are peeled
// off first (they cause no fill), the remaining nucleus is factored densely
// with partial pivoting when small and by a sparse LU otherwise.

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <vector>

namespace crossflow::milp::detail {

class BasisLu {
 public:
  // Column r of the basis holds entries rows[start[r] .. start[r+1]) with the
  // matching values. Returns false when the matrix is numerically singular.
  bool factor(int m, const std::vector<int>& start, const std::vector<int>& rows, const std::vector<double>& values);

  // Solves B x = b. On entry v is indexed by row, on exit by basis position.
  void ftran(std::vector<double>& v) const;
  // Solves B' y = c. On entry v is indexed by basis position, on exit by row.
  void btran(std::vector<double>& v) const;

  int nucleus_size() const { return static_cast<int>(nucleus_rows_.size()); }

 private:
  struct Pivot {
    int row = 0;
    int col = 0;
    double value = 0.0;
    bool row_singleton = false;
    int begin = 0;  // span in etas_ (row singletons: L column, column singletons: U row)
    int end = 0;
  };
  struct Entry {
    int index = 0;
    double value = 0.0;
  };

  int m_ = 0;
  std::vector<Pivot> pivots_;
  std::vector<Entry> etas_;
  std::vector<int> nucleus_rows_, nucleus_cols_;
  static constexpr int kDenseNucleusLimit = 48;
  bool sparse_nucleus_ = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> nucleus_lu_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> sparse_lu_;
  mutable std::vector<double> work_;
  mutable Eigen::VectorXd nucleus_work_;
};

}  // namespace crossflow::milp::detail
