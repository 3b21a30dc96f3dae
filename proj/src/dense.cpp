#include "cascadic/dense.hpp"

#include <cmath>
#include <utility>

#include "cascadic/error.hpp"

namespace cascadic {

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& m) {
  DenseMatrix d(m.rows(), m.cols());
  const auto offsets = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) d(i, static_cast<std::size_t>(cols[k])) += vals[k];
  }
  return d;
}

DenseLu::DenseLu(DenseMatrix a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw Error(ErrorCode::DimensionMismatch, "LU needs a square matrix");
  const std::size_t n = lu_.rows();
  pivot_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
    }
    pivot_[k] = p;
    if (lu_(p, k) == 0.0) throw Error(ErrorCode::NotSpd, "singular matrix in dense LU");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = lu_(i, k) * inv;
      lu_(i, k) = factor;
      if (factor == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
    }
  }
}

Vector DenseLu::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "dense solve: rhs has wrong length");
  Vector x(b.begin(), b.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (pivot_[k] != k) std::swap(x[k], x[pivot_[k]]);
    for (std::size_t i = k + 1; i < n; ++i) x[i] -= lu_(i, k) * x[k];
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = k + 1; j < n; ++j) x[k] -= lu_(k, j) * x[j];
    x[k] /= lu_(k, k);
  }
  return x;
}

SaddleSolution dense_oracle_solve(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& mp,
                                  std::span<const double> f, std::span<const double> g) {
  const std::size_t nv = a.rows();
  const std::size_t np = b.rows();
  if (nv + np > kDenseOracleCap) throw Error(ErrorCode::TooLarge, "dense oracle is limited to 2000 unknowns");
  if (a.cols() != nv || b.cols() != nv || mp.rows() != np || mp.cols() != np || f.size() != nv ||
      g.size() != np) {
    throw Error(ErrorCode::DimensionMismatch, "dense oracle: inconsistent block sizes");
  }

  const DenseLu a_lu(DenseMatrix::from_sparse(a));
  const DenseMatrix bd = DenseMatrix::from_sparse(b);
  const DenseMatrix md = DenseMatrix::from_sparse(mp);

  // Z = A^{-1} B^T, column by column.
  DenseMatrix z(nv, np);
  for (std::size_t m = 0; m < np; ++m) {
    Vector col(nv);
    for (std::size_t i = 0; i < nv; ++i) col[i] = bd(m, i);
    const Vector zc = a_lu.solve(col);
    for (std::size_t i = 0; i < nv; ++i) z(i, m) = zc[i];
  }

  // Mp 1 and the compatible data g' = g - (1^T g / 1^T Mp 1) Mp 1.
  Vector mp_one(np, 0.0);
  for (std::size_t m = 0; m < np; ++m) {
    for (std::size_t n = 0; n < np; ++n) mp_one[m] += md(m, n);
  }
  double total_mass = 0.0;
  double g_sum = 0.0;
  for (std::size_t m = 0; m < np; ++m) {
    total_mass += mp_one[m];
    g_sum += g[m];
  }
  Vector g_compat(g.begin(), g.end());
  for (std::size_t m = 0; m < np; ++m) g_compat[m] -= (g_sum / total_mass) * mp_one[m];

  // (S + Mp 1 1^T Mp) p = B A^{-1} f - g'  forces 1^T Mp p = 0 and S p = rhs.
  const Vector a_inv_f = a_lu.solve(f);
  DenseMatrix s(np, np);
  Vector rhs(np, 0.0);
  for (std::size_t m = 0; m < np; ++m) {
    for (std::size_t i = 0; i < nv; ++i) rhs[m] += bd(m, i) * a_inv_f[i];
    rhs[m] -= g_compat[m];
    for (std::size_t n = 0; n < np; ++n) {
      double sum = 0.0;
      for (std::size_t i = 0; i < nv; ++i) sum += bd(m, i) * z(i, n);
      s(m, n) = sum + mp_one[m] * mp_one[n];
    }
  }
  SaddleSolution sol;
  sol.p = DenseLu(std::move(s)).solve(rhs);

  Vector rhs_u(f.begin(), f.end());
  for (std::size_t i = 0; i < nv; ++i) {
    for (std::size_t m = 0; m < np; ++m) rhs_u[i] -= bd(m, i) * sol.p[m];
  }
  sol.u = a_lu.solve(rhs_u);
  return sol;
}

}  // namespace cascadic
