#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cascadic/sparse.hpp"

namespace cascadic {

/// Row-major dense matrix used by the reference (oracle) solvers.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix from_sparse(const SparseMatrix& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting.
class DenseLu {
 public:
  explicit DenseLu(DenseMatrix a);
  Vector solve(std::span<const double> b) const;
  std::size_t size() const { return lu_.rows(); }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> pivot_;
};

/// Largest total size (velocity + pressure) accepted by dense_oracle_solve.
inline constexpr std::size_t kDenseOracleCap = 2000;

struct SaddleSolution {
  Vector u;
  Vector p;
};

/// Reference solution of  A u + B^T p = f,  B u = g  by dense block
/// elimination. The constant pressure mode (kernel of B^T) is fixed by
/// requiring 1^T Mp p = 0, and g is made compatible by removing its
/// component along Mp 1, which is what the mean-zero projected iterations
/// converge to.
SaddleSolution dense_oracle_solve(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& mp,
                                  std::span<const double> f, std::span<const double> g);

}  // namespace cascadic
