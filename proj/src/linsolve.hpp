#pragma once

// Symmetric positive-definite solves shared by the graph, PDE and rate code.
// Small systems go through a dense Cholesky factorisation; larger ones use
// preconditioned conjugate gradients. Both paths are checked against a
// relative residual of 1e-12.

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

namespace sghydro::detail {

inline constexpr Eigen::Index kDenseSolveLimit = 500;
inline constexpr double kSolveTolerance = 1e-12;

class SpdSolver {
 public:
  explicit SpdSolver(Eigen::SparseMatrix<double> a);

  /// Throws Error(Numerical) when the relative residual stays above
  /// kSolveTolerance.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  Eigen::Index size() const { return a_.rows(); }

 private:
  using Cg = Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                      Eigen::IncompleteCholesky<double>>;
  Eigen::SparseMatrix<double> a_;
  std::unique_ptr<Eigen::LLT<Eigen::MatrixXd>> dense_;
  std::unique_ptr<Cg> cg_;
};

/// Extracts the rows/columns of `a` selected by `keep` (new index = position
/// in `keep`).
Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& a,
                                      const std::vector<Eigen::Index>& rows,
                                      const std::vector<Eigen::Index>& cols);

}  // namespace sghydro::detail
