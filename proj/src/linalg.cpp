#include "fpsi/linalg.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <stdexcept>

namespace fpsi {

namespace {
double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}
}  // namespace

SparseMatrix::SparseMatrix(int rows, int cols, const std::vector<Triplet>& triplets)
    : mat_(rows, cols) {
  mat_.setFromTriplets(triplets.begin(), triplets.end());
  mat_.makeCompressed();
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != cols()) throw std::invalid_argument("multiply: size mismatch");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
  Eigen::VectorXd y = mat_ * xv;
  return {y.data(), y.data() + y.size()};
}

std::vector<double> lu_solve(const SparseMatrix& A, const std::vector<double>& b,
                             LinearSolveReport* report) {
  LuSolver solver;
  solver.factorize(A);
  return solver.solve(b, report);
}

void LuSolver::factorize(const SparseMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("lu: matrix must be square");
  const auto start = std::chrono::steady_clock::now();
  acm_ = A.eigen();  // row-major -> column-major conversion
  if (!analyzed_) {
    lu_.analyzePattern(acm_);
    analyzed_ = true;
  }
  lu_.factorize(acm_);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("sparse LU factorization failed (singular pivot)");
  factor_seconds_last_ = seconds_since(start);
}

std::vector<double> LuSolver::solve(const std::vector<double>& b, LinearSolveReport* report) {
  if (static_cast<int>(b.size()) != acm_.rows())
    throw std::invalid_argument("lu solve: rhs size mismatch");
  const auto start = std::chrono::steady_clock::now();
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), b.size());
  Eigen::VectorXd x = lu_.solve(bv);
  if (lu_.info() != Eigen::Success) throw std::runtime_error("sparse LU solve failed");
  if (report) {
    report->solve_seconds = seconds_since(start);
    report->factor_seconds = factor_seconds_last_;
    report->rhs_norm = bv.norm();
    report->residual_norm = (acm_ * x - bv).norm();
  }
  return {x.data(), x.data() + x.size()};
}

double smallest_singular_estimate(const SparseMatrix& B, const SparseMatrix& X,
                                  const SparseMatrix& W) {
  if (B.cols() != X.rows() || X.rows() != X.cols())
    throw std::invalid_argument("smallest_singular_estimate: X dimension mismatch");
  if (B.rows() != W.rows() || W.rows() != W.cols())
    throw std::invalid_argument("smallest_singular_estimate: W dimension mismatch");
  if (B.rows() > B.cols()) return 0.0;  // constraints exceed velocity dofs

  Eigen::MatrixXd Bd = Eigen::MatrixXd(B.eigen());
  Eigen::MatrixXd Xd = Eigen::MatrixXd(X.eigen());
  Eigen::MatrixXd Wd = Eigen::MatrixXd(W.eigen());

  Eigen::LLT<Eigen::MatrixXd> lltX(Xd);
  Eigen::LLT<Eigen::MatrixXd> lltW(Wd);
  if (lltX.info() != Eigen::Success || lltW.info() != Eigen::Success)
    throw std::runtime_error("smallest_singular_estimate: norm matrices not SPD");

  // whiten: G = Lw^{-1} B Lx^{-T}; then beta = sigma_min over the row space
  Eigen::MatrixXd G = lltW.matrixL().solve(Bd);
  G = lltX.matrixL().solve(G.transpose()).transpose();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1);
}

}  // namespace fpsi
