#include "linsolve.hpp"

#include <string>

#include "sghydro/error.hpp"

namespace sghydro::detail {

SpdSolver::SpdSolver(Eigen::SparseMatrix<double> a) : a_(std::move(a)) {
  a_.makeCompressed();
  if (a_.rows() != a_.cols()) fail(ErrorKind::InvalidArgument, "SPD solve: matrix is not square");
  if (a_.rows() == 0) return;
  if (a_.rows() < kDenseSolveLimit) {
    dense_ = std::make_unique<Eigen::LLT<Eigen::MatrixXd>>(Eigen::MatrixXd(a_));
    if (dense_->info() != Eigen::Success)
      fail(ErrorKind::Numerical, "SPD solve: Cholesky factorisation failed (matrix not positive definite)");
  } else {
    cg_ = std::make_unique<Cg>();
    cg_->setTolerance(kSolveTolerance * 0.1);
    cg_->setMaxIterations(20 * a_.rows());
    cg_->compute(a_);
    if (cg_->info() != Eigen::Success)
      fail(ErrorKind::Numerical, "SPD solve: preconditioner setup failed");
  }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const {
  if (b.size() != a_.rows()) fail(ErrorKind::InvalidArgument, "SPD solve: right-hand side has wrong size");
  if (a_.rows() == 0) return b;
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());

  Eigen::VectorXd x;
  if (dense_) {
    x = dense_->solve(b);
    // one refinement sweep is enough for the conditioning we see on Gamma_N
    Eigen::VectorXd r = b - a_ * x;
    if (r.norm() > kSolveTolerance * bnorm) x += dense_->solve(r);
  } else {
    x = cg_->solve(b);
  }
  const double rel = (b - a_ * x).norm() / bnorm;
  if (!(rel <= kSolveTolerance))
    fail(ErrorKind::Numerical, "SPD solve did not converge: relative residual " + std::to_string(rel));
  return x;
}

Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& a,
                                      const std::vector<Eigen::Index>& rows,
                                      const std::vector<Eigen::Index>& cols) {
  std::vector<Eigen::Index> row_map(static_cast<std::size_t>(a.rows()), -1);
  std::vector<Eigen::Index> col_map(static_cast<std::size_t>(a.cols()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_map[static_cast<std::size_t>(rows[i])] = static_cast<Eigen::Index>(i);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[static_cast<std::size_t>(cols[j])] = static_cast<Eigen::Index>(j);

  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      const auto r = row_map[static_cast<std::size_t>(it.row())];
      const auto c = col_map[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  }
  Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace sghydro::detail
