// Solvers for the assembled SPD systems: sparse Cholesky for moderate sizes
// and preconditioned conjugate gradients with an element-block Jacobi
// preconditioner for large ones.

#ifndef FOLDPLATE_SOLVER_HPP
#define FOLDPLATE_SOLVER_HPP

#include "foldplate/assembly.hpp"
#include "foldplate/types.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

namespace foldplate {

struct SolveReport {
  std::string method;
  int iterations = 0;
  double rel_residual = 0.0;  // ||b - A x|| / ||b||, recomputed from scratch
  double seconds = 0.0;
};

namespace detail {

inline double recomputed_residual(const SparseSystem& sys,
                                  const Eigen::VectorXd& x) {
  const double nb = sys.rhs.norm();
  if (nb == 0.0) return (sys.matrix * x).norm();
  return (sys.rhs - sys.matrix * x).norm() / nb;
}

// Inverse of each element's diagonal block.
class BlockJacobi {
 public:
  BlockJacobi(const SparseSystem& sys, int block_size) : bs_(block_size) {
    const int nb = sys.n / bs_;
    blocks_.reserve(nb);
    Eigen::MatrixXd blk(bs_, bs_);
    for (int b = 0; b < nb; ++b) {
      blk.setZero();
      for (int i = 0; i < bs_; ++i)
        for (int j = 0; j < bs_; ++j)
          blk(i, j) = sys.matrix.coeff(b * bs_ + i, b * bs_ + j);
      blocks_.push_back(blk.ldlt());
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const {
    Eigen::VectorXd z(r.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      z.segment(b * bs_, bs_) = blocks_[b].solve(r.segment(b * bs_, bs_));
    return z;
  }

 private:
  int bs_;
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> blocks_;
};

}  // namespace detail

/// Preconditioned CG. Returns once the recomputed relative residual meets
/// tol; detecting negative curvature aborts with a hint that the penalty
/// parameters are too small for coercivity.
inline std::pair<Eigen::VectorXd, SolveReport> solve_cg(
    const SparseSystem& sys, int block_size, double tol = 1e-10,
    int max_iter = -1) {
  const auto t0 = std::chrono::steady_clock::now();
  if (max_iter < 0) max_iter = static_cast<int>(50.0 * std::sqrt(sys.n)) + 1000;
  detail::check_numeric(sys.rhs.allFinite(), "solve_cg: non-finite rhs");

  SolveReport report;
  report.method = "cg";
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.n);
  if (sys.rhs.norm() == 0.0) {
    report.rel_residual = 0.0;
    report.seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return {x, report};
  }

  const detail::BlockJacobi precond(sys, block_size);
  Eigen::VectorXd r = sys.rhs;
  Eigen::VectorXd z = precond.apply(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double nb = sys.rhs.norm();

  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd ap = sys.matrix * p;
    const double pap = p.dot(ap);
    if (pap <= 0.0)
      throw NumericalError(
          "solve_cg: negative curvature encountered; system is not positive "
          "definite (penalty parameters too small?)");
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    report.iterations = it;
    if (r.norm() <= tol * nb) {
      const double true_res = detail::recomputed_residual(sys, x);
      if (true_res <= tol) {
        report.rel_residual = true_res;
        report.seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        return {x, report};
      }
      // refresh the recurrence and restart the direction
      r = sys.rhs - sys.matrix * x;
      z = precond.apply(r);
      rz = r.dot(z);
      p = z;
      continue;
    }
    z = precond.apply(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  report.rel_residual = detail::recomputed_residual(sys, x);
  throw NumericalError("solve_cg: no convergence within " +
                       std::to_string(max_iter) + " iterations (residual " +
                       std::to_string(report.rel_residual) + ")");
}

/// Sparse symmetric Cholesky solve.
inline std::pair<Eigen::VectorXd, SolveReport> solve_direct(
    const SparseSystem& sys) {
  const auto t0 = std::chrono::steady_clock::now();
  detail::require(sys.n <= 200000, "solve_direct: system too large");
  SolveReport report;
  report.method = "direct";

  Eigen::SparseMatrix<double> a = sys.matrix;  // column-major copy
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericalError(
        "solve_direct: Cholesky factorization failed (loss of coercivity?)");
  Eigen::VectorXd x = llt.solve(sys.rhs);
  report.rel_residual = detail::recomputed_residual(sys, x);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {x, report};
}

enum class SolverKind { Auto, Cg, Direct };

/// Direct solve up to 50k unknowns, CG above.
inline std::pair<Eigen::VectorXd, SolveReport> solve(const SparseSystem& sys,
                                                     int block_size,
                                                     SolverKind kind,
                                                     double tol = 1e-10) {
  switch (kind) {
    case SolverKind::Direct:
      return solve_direct(sys);
    case SolverKind::Cg:
      return solve_cg(sys, block_size, tol);
    default:
      return sys.n <= 50000 ? solve_direct(sys) : solve_cg(sys, block_size, tol);
  }
}

}  // namespace foldplate

#endif
