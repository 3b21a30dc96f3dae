#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cascadic {

using Vector = std::vector<double>;

/// Compressed-row matrix. Column indices are sorted and unique within a row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<int> columns, std::vector<double> values);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const int> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }

  /// Entry (i, j), zero when not stored. Binary search in row i.
  double coeff(std::size_t i, std::size_t j) const;

  SparseMatrix transpose() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<int> columns_;
  std::vector<double> values_;
};

/// Accumulates (row, col, value) contributions; duplicates are summed in
/// insertion order so the result is deterministic.
class TripletBuilder {
 public:
  TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void reserve(std::size_t n) { entries_.reserve(n); }
  void add(int row, int col, double value) { entries_.push_back({row, col, value}); }

  SparseMatrix build() const;

 private:
  struct Entry {
    int row;
    int col;
    double value;
  };
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> entries_;
};

Vector matvec(const SparseMatrix& m, std::span<const double> x);
Vector matvec_transpose(const SparseMatrix& m, std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// Largest |a_ij - a_ji| relative to the largest |a_ij|.
double symmetry_defect(const SparseMatrix& m);

}  // namespace cascadic
