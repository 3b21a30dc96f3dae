#pragma once

#include <memory>
#include <span>

#include "cascadic/sparse.hpp"

namespace cascadic {

/// Relative residual that defines an "exact" SPD solve.
inline constexpr double kExactSolveTolerance = 1e-12;

enum class SpdMethod { Cholesky, Cg };

struct SpdSolveReport {
  Vector x;
  double relative_residual = 0.0;
  /// Refinement sweeps (Cholesky) or CG iterations.
  int iterations = 0;
};

/// Solver for one symmetric positive definite matrix.
///
/// The Cholesky path factors once at construction and applies iterative
/// refinement against the original matrix until the relative residual reaches
/// the tolerance or stops improving. The CG path uses Jacobi preconditioning
/// and throws Stagnation when the cap is hit. A constructed solver is
/// immutable; concurrent solve() calls are safe.
class SpdSolver {
 public:
  explicit SpdSolver(SparseMatrix matrix, SpdMethod method = SpdMethod::Cholesky,
                     double tolerance = kExactSolveTolerance);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  Vector solve(std::span<const double> b) const { return solve_with_report(b).x; }
  SpdSolveReport solve_with_report(std::span<const double> b) const;

  const SparseMatrix& matrix() const { return matrix_; }
  SpdMethod method() const { return method_; }
  double tolerance() const { return tolerance_; }
  std::size_t size() const { return matrix_.rows(); }

 private:
  struct Factor;

  SpdSolveReport solve_cholesky(std::span<const double> b) const;
  SpdSolveReport solve_cg(std::span<const double> b) const;

  SparseMatrix matrix_;
  SpdMethod method_;
  double tolerance_;
  std::unique_ptr<Factor> factor_;
  Vector inverse_diagonal_;
};

}  // namespace cascadic
