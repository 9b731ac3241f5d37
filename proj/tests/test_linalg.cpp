#include <doctest.h>

#include <random>

#include "fpsi/linalg.hpp"
#include "oracles.hpp"

using namespace fpsi;

TEST_CASE("lu_solve: identity and diagonal") {
  std::vector<Triplet> id = {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
  SparseMatrix I(3, 3, id);
  std::vector<double> b = {1.0, -2.0, 3.0};
  CHECK(lu_solve(I, b) == b);

  std::vector<Triplet> diag = {{0, 0, 2.0}, {1, 1, 4.0}};
  SparseMatrix D(2, 2, diag);
  auto x = lu_solve(D, {2.0, 4.0});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("lu_solve: random SPD system with residual report") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int n = 50;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = coef(rng);
  Eigen::MatrixXd S = M.transpose() * M + 0.5 * Eigen::MatrixXd::Identity(n, n);
  std::vector<Triplet> trip;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) trip.emplace_back(i, j, S(i, j));
  SparseMatrix A(n, n, trip);
  std::vector<double> b(n);
  for (double& v : b) v = coef(rng);
  LinearSolveReport report;
  auto x = lu_solve(A, b, &report);
  CHECK(report.residual_norm < 1e-10 * report.rhs_norm + 1e-14);
  auto Ax = A.multiply(x);
  for (int i = 0; i < n; ++i) CHECK(Ax[i] == doctest::Approx(b[i]).epsilon(1e-10));
}

TEST_CASE("lu detects singular systems") {
  std::vector<Triplet> trip = {{0, 0, 1.0}, {1, 0, 1.0}};  // rank 1
  SparseMatrix A(2, 2, trip);
  CHECK_THROWS(lu_solve(A, {1.0, 1.0}));
}

TEST_CASE("csr layout exposed") {
  std::vector<Triplet> trip = {{0, 1, 2.0}, {1, 0, 3.0}, {0, 0, 1.0}};
  SparseMatrix A(2, 2, trip);
  CHECK(A.nonzeros() == 3);
  CHECK(A.row_offsets()[0] == 0);
  CHECK(A.row_offsets()[1] == 2);
  CHECK(A.col_indices()[0] == 0);  // sorted within the row
  CHECK(A.col_indices()[1] == 1);
  CHECK(A.values()[1] == doctest::Approx(2.0));
}

TEST_CASE("smallest singular estimate: trivial cases") {
  std::vector<Triplet> empty;
  std::vector<Triplet> id2 = {{0, 0, 1.0}, {1, 1, 1.0}};
  std::vector<Triplet> id3 = {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
  SparseMatrix B0(2, 3, empty);
  SparseMatrix X(3, 3, id3), W(2, 2, id2);
  CHECK(smallest_singular_estimate(B0, X, W) == doctest::Approx(0.0));
  std::vector<Triplet> bid = {{0, 0, 1.0}, {1, 1, 1.0}};
  SparseMatrix B(2, 3, bid);
  CHECK(smallest_singular_estimate(B, X, W) == doctest::Approx(1.0));
}

TEST_CASE("smallest singular estimate agrees with the eigenvalue oracle") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const int nv = 12, nw = 5;
  std::vector<Triplet> btrip;
  for (int i = 0; i < nw; ++i)
    for (int j = 0; j < nv; ++j) btrip.emplace_back(i, j, coef(rng));
  auto spd = [&](int n) {
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = coef(rng);
    Eigen::MatrixXd S = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
    std::vector<Triplet> trip;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) trip.emplace_back(i, j, S(i, j));
    return trip;
  };
  SparseMatrix B(nw, nv, btrip), X(nv, nv, spd(nv)), W(nw, nw, spd(nw));
  const double est = smallest_singular_estimate(B, X, W);
  const double oracle = oracles::infsup_eigen_oracle(B, X, W);
  CHECK(est == doctest::Approx(oracle).epsilon(1e-10));
}
