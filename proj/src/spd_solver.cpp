#include "cascadic/spd_solver.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "cascadic/error.hpp"

namespace cascadic {

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Simplicial LLT with AMD ordering; needs no BLAS.
using EigenFactorization = Eigen::SimplicialLLT<EigenSparse, Eigen::Lower>;

constexpr int kMaxRefinementSweeps = 4;

// Lower triangle of a symmetric CSR matrix as a column-major Eigen matrix:
// row i of the CSR upper part is column i of the lower part.
EigenSparse lower_triangle(const SparseMatrix& m) {
  const auto offsets = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  const auto n = static_cast<Eigen::Index>(m.rows());
  EigenSparse lower(n, n);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(n);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      if (static_cast<std::size_t>(cols[k]) >= i) ++counts[static_cast<Eigen::Index>(i)];
    }
  }
  lower.reserve(counts);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      if (static_cast<std::size_t>(cols[k]) >= i) {
        lower.insert(cols[k], static_cast<Eigen::Index>(i)) = vals[k];
      }
    }
  }
  lower.makeCompressed();
  return lower;
}

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
                         Vector& residual) {
  residual = matvec(a, x);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = b[i] - residual[i];
  const double nb = norm2(b);
  const double nr = norm2(residual);
  return nb > 0.0 ? nr / nb : nr;
}

}  // namespace

struct SpdSolver::Factor {
  EigenFactorization llt;
};

SpdSolver::SpdSolver(SparseMatrix matrix, SpdMethod method, double tolerance)
    : matrix_(std::move(matrix)), method_(method), tolerance_(tolerance) {
  if (matrix_.rows() != matrix_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "SPD solver needs a square matrix");
  }
  const std::size_t n = matrix_.rows();
  inverse_diagonal_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = matrix_.coeff(i, i);
    if (!(d > 0.0)) throw Error(ErrorCode::NotSpd, "nonpositive diagonal entry");
    inverse_diagonal_[i] = 1.0 / d;
  }
  if (method_ == SpdMethod::Cholesky && n > 0) {
    factor_ = std::make_unique<Factor>();
    factor_->llt.compute(lower_triangle(matrix_));
    if (factor_->llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NotSpd, "Cholesky factorization met a nonpositive pivot");
    }
  }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

SpdSolveReport SpdSolver::solve_with_report(std::span<const double> b) const {
  if (b.size() != matrix_.rows()) throw Error(ErrorCode::DimensionMismatch, "rhs has wrong length");
  if (matrix_.rows() == 0) return {};
  return method_ == SpdMethod::Cholesky ? solve_cholesky(b) : solve_cg(b);
}

SpdSolveReport SpdSolver::solve_cholesky(std::span<const double> b) const {
  const auto n = static_cast<Eigen::Index>(b.size());
  SpdSolveReport report;
  report.x.assign(b.size(), 0.0);
  if (norm2(b) == 0.0) return report;

  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
  Eigen::VectorXd x = factor_->llt.solve(rhs);
  report.x.assign(x.data(), x.data() + n);

  Vector residual;
  report.relative_residual = relative_residual(matrix_, report.x, b, residual);
  // Refinement stops at the tolerance or once rounding dominates.
  while (report.relative_residual > tolerance_ && report.iterations < kMaxRefinementSweeps) {
    Eigen::Map<const Eigen::VectorXd> r(residual.data(), n);
    const Eigen::VectorXd dx = factor_->llt.solve(r);
    Vector candidate = report.x;
    for (Eigen::Index i = 0; i < n; ++i) candidate[static_cast<std::size_t>(i)] += dx[i];
    Vector candidate_residual;
    const double rel = relative_residual(matrix_, candidate, b, candidate_residual);
    ++report.iterations;
    if (!(rel < report.relative_residual)) break;
    const bool slow = rel > 0.5 * report.relative_residual;
    report.x = std::move(candidate);
    residual = std::move(candidate_residual);
    report.relative_residual = rel;
    if (slow) break;
  }
  return report;
}

SpdSolveReport SpdSolver::solve_cg(std::span<const double> b) const {
  const std::size_t n = b.size();
  SpdSolveReport report;
  report.x.assign(n, 0.0);
  const double nb = norm2(b);
  if (nb == 0.0) return report;

  Vector r(b.begin(), b.end());
  Vector z(n), p(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inverse_diagonal_[i] * r[i];
  p = z;
  double rz = dot(r, z);
  const int cap = static_cast<int>(std::max<std::size_t>(10 * n, 1000));
  for (int it = 1; it <= cap; ++it) {
    const Vector ap = matvec(matrix_, p);
    const double curvature = dot(p, ap);
    if (!(curvature > 0.0)) throw Error(ErrorCode::NotSpd, "CG met nonpositive curvature");
    const double alpha = rz / curvature;
    axpy(alpha, p, report.x);
    axpy(-alpha, ap, r);
    report.iterations = it;
    // The recurrence residual drifts; confirm convergence against b - Ax.
    if (norm2(r) <= tolerance_ * nb) {
      Vector true_residual;
      report.relative_residual = relative_residual(matrix_, report.x, b, true_residual);
      if (report.relative_residual <= tolerance_) return report;
      r = std::move(true_residual);
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inverse_diagonal_[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw Error(ErrorCode::Stagnation, "CG did not reach the solve tolerance");
}

}  // namespace cascadic
