#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#ifdef FPSI_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif
#include <memory>
#include <vector>

namespace fpsi {

using Triplet = Eigen::Triplet<double>;

/// CSR sparse matrix. Row-major Eigen storage in compressed mode is CSR:
/// outer = row offsets, inner = sorted unique column indices.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, const std::vector<Triplet>& triplets);

  int rows() const { return static_cast<int>(mat_.rows()); }
  int cols() const { return static_cast<int>(mat_.cols()); }
  int nonzeros() const { return static_cast<int>(mat_.nonZeros()); }
  const int* row_offsets() const { return mat_.outerIndexPtr(); }
  const int* col_indices() const { return mat_.innerIndexPtr(); }
  const double* values() const { return mat_.valuePtr(); }

  std::vector<double> multiply(const std::vector<double>& x) const;

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& eigen() const { return mat_; }

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> mat_;
};

struct LinearSolveReport {
  double residual_norm = 0.0;  // ||Ax-b||_2 recomputed after the solve
  double rhs_norm = 0.0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Direct sparse LU (column ordering + partial pivoting). One-shot interface.
std::vector<double> lu_solve(const SparseMatrix& A, const std::vector<double>& b,
                             LinearSolveReport* report = nullptr);

/// Reusable LU with symbolic analysis done once for a fixed sparsity pattern.
class LuSolver {
 public:
  void factorize(const SparseMatrix& A);
  std::vector<double> solve(const std::vector<double>& b, LinearSolveReport* report = nullptr);

 private:
  Eigen::SparseMatrix<double> acm_;  // column-major copy for the factorization
#ifdef FPSI_HAVE_UMFPACK
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu_;
#else
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
#endif
  bool analyzed_ = false;
  double factor_seconds_last_ = 0.0;
};

/// Smallest generalized singular value of a constraint block B:
///   inf_w sup_v (w^T B v) / (|v|_X |w|_W)
/// with SPD norm matrices X (column space) and W (row space). Dense
/// computation; intended for coarse meshes.
double smallest_singular_estimate(const SparseMatrix& B, const SparseMatrix& X,
                                  const SparseMatrix& W);

}  // namespace fpsi
