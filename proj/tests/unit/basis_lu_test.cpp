#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "milp/basis_lu.hpp"

using crossflow::milp::detail::BasisLu;

namespace {

struct Csc {
  std::vector<int> start{0}, rows;
  std::vector<double> values;
};

Csc to_csc(const Eigen::MatrixXd& a) {
  Csc out;
  for (int c = 0; c < a.cols(); ++c) {
    for (int r = 0; r < a.rows(); ++r) {
      if (a(r, c) != 0.0) {
        out.rows.push_back(r);
        out.values.push_back(a(r, c));
      }
    }
    out.start.push_back(static_cast<int>(out.rows.size()));
  }
  return out;
}

// Permuted triangular matrix with a dense block coupling a few rows and
// columns, so both the singleton passes and the nucleus are exercised.
Eigen::MatrixXd random_basis(std::mt19937& rng, int m, int nucleus) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = (unit(rng) < 0.5 ? -1.0 : 1.0) * (1.0 + unit(rng));
    for (int j = 0; j < i; ++j) {
      if (unit(rng) < 0.15) a(i, j) = coef(rng);
    }
  }
  for (int i = m - nucleus; i < m; ++i) {
    for (int j = m - nucleus; j < m; ++j) a(i, j) += coef(rng);
    a(i, i) += 4.0 * nucleus;
  }
  std::vector<int> rp(m), cp(m);
  for (int i = 0; i < m; ++i) rp[i] = cp[i] = i;
  std::shuffle(rp.begin(), rp.end(), rng);
  std::shuffle(cp.begin(), cp.end(), rng);
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) out(rp[i], cp[j]) = a(i, j);
  }
  return out;
}

}  // namespace

TEST_CASE("basis LU solves match a dense factorization") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 1 + trial % 25;
    const int nucleus = trial % 3 == 0 ? 0 : std::min(m, 1 + trial % 6);
    const Eigen::MatrixXd a = random_basis(rng, m, nucleus);
    const Csc csc = to_csc(a);
    BasisLu lu;
    REQUIRE(lu.factor(m, csc.start, csc.rows, csc.values));
    const Eigen::FullPivLU<Eigen::MatrixXd> oracle(a);

    std::vector<double> b(m);
    for (double& v : b) v = coef(rng);
    const Eigen::VectorXd want_x = oracle.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), m));
    const Eigen::VectorXd want_y = oracle.transpose().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), m));

    std::vector<double> x = b;
    lu.ftran(x);
    std::vector<double> y = b;
    lu.btran(y);
    for (int i = 0; i < m; ++i) {
      CHECK(x[i] == doctest::Approx(want_x[i]).epsilon(1e-9));
      CHECK(y[i] == doctest::Approx(want_y[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("basis LU peels a triangular matrix without a nucleus") {
  std::mt19937 rng(11);
  const Eigen::MatrixXd a = random_basis(rng, 40, 0);
  const Csc csc = to_csc(a);
  BasisLu lu;
  REQUIRE(lu.factor(40, csc.start, csc.rows, csc.values));
  CHECK(lu.nucleus_size() == 0);
}

TEST_CASE("basis LU rejects singular matrices") {
  SUBCASE("empty column") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
    a(2, 2) = 0.0;
    const Csc csc = to_csc(a);
    BasisLu lu;
    CHECK_FALSE(lu.factor(4, csc.start, csc.rows, csc.values));
  }
  SUBCASE("dependent columns") {
    Eigen::MatrixXd a(3, 3);
    a << 1, 2, 3, 2, 4, 1, 3, 6, 2;
    const Csc csc = to_csc(a);
    BasisLu lu;
    CHECK_FALSE(lu.factor(3, csc.start, csc.rows, csc.values));
  }
}

TEST_CASE("basis LU handles a large nucleus") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int nucleus : {49, 80, 150}) {
    const int m = nucleus + 60;
    const Eigen::MatrixXd a = random_basis(rng, m, nucleus);
    const Csc csc = to_csc(a);
    BasisLu lu;
    REQUIRE(lu.factor(m, csc.start, csc.rows, csc.values));
    CHECK(lu.nucleus_size() >= nucleus);
    const Eigen::FullPivLU<Eigen::MatrixXd> oracle(a);
    std::vector<double> b(m);
    for (double& v : b) v = coef(rng);
    const Eigen::VectorXd want_x = oracle.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), m));
    const Eigen::VectorXd want_y = oracle.transpose().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), m));
    std::vector<double> x = b;
    lu.ftran(x);
    std::vector<double> y = b;
    lu.btran(y);
    for (int i = 0; i < m; ++i) {
      CHECK(x[i] == doctest::Approx(want_x[i]).epsilon(1e-9));
      CHECK(y[i] == doctest::Approx(want_y[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("basis LU rejects a large singular nucleus") {
  std::mt19937 rng(29);
  Eigen::MatrixXd a = random_basis(rng, 100, 70);
  // Make one column a combination of two others.
  a.col(5) = 2.0 * a.col(7) - a.col(11);
  const Csc csc = to_csc(a);
  BasisLu lu;
  CHECK_FALSE(lu.factor(100, csc.start, csc.rows, csc.values));
}
