#include "cascadic/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascadic/error.hpp"

namespace cascadic {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                           std::vector<int> columns, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      columns_(std::move(columns)),
      values_(std::move(values)) {
  if (row_offsets_.size() != rows_ + 1 || columns_.size() != values_.size() ||
      row_offsets_.back() != values_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent CSR arrays");
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::vector<int> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto begin = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto end = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j)) return 0.0;
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> offsets(cols_ + 1, 0);
  for (int c : columns_) ++offsets[static_cast<std::size_t>(c) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<int> cols(values_.size());
  std::vector<double> vals(values_.size());
  std::vector<std::size_t> next(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t pos = next[static_cast<std::size_t>(columns_[k])]++;
      cols[pos] = static_cast<int>(i);
      vals[pos] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix TripletBuilder::build() const {
  // Counting sort by row keeps insertion order within each row; a stable sort
  // by column then fixes the summation order of duplicates.
  std::vector<std::size_t> offsets(rows_ + 1, 0);
  for (const auto& e : entries_) {
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= rows_ ||
        static_cast<std::size_t>(e.col) >= cols_) {
      throw Error(ErrorCode::DimensionMismatch, "triplet index out of range");
    }
    ++offsets[static_cast<std::size_t>(e.row) + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::pair<int, double>> sorted(entries_.size());
  {
    std::vector<std::size_t> next(offsets.begin(), offsets.end() - 1);
    for (const auto& e : entries_) sorted[next[static_cast<std::size_t>(e.row)]++] = {e.col, e.value};
  }

  std::vector<std::size_t> out_offsets(rows_ + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(entries_.size() / 2);
  vals.reserve(entries_.size() / 2);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto begin = sorted.begin() + static_cast<std::ptrdiff_t>(offsets[r]);
    auto end = sorted.begin() + static_cast<std::ptrdiff_t>(offsets[r + 1]);
    std::stable_sort(begin, end, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = begin; it != end; ++it) {
      if (!cols.empty() && vals.size() > out_offsets[r] && cols.back() == it->first) {
        vals.back() += it->second;
      } else {
        cols.push_back(it->first);
        vals.push_back(it->second);
      }
    }
    out_offsets[r + 1] = vals.size();
  }
  return SparseMatrix(rows_, cols_, std::move(out_offsets), std::move(cols), std::move(vals));
}

Vector matvec(const SparseMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "matvec: x has wrong length");
  const auto offsets = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  Vector y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) sum += vals[k] * x[static_cast<std::size_t>(cols[k])];
    y[i] = sum;
  }
  return y;
}

Vector matvec_transpose(const SparseMatrix& m, std::span<const double> x) {
  if (x.size() != m.rows()) throw Error(ErrorCode::DimensionMismatch, "matvec_transpose: x has wrong length");
  const auto offsets = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  Vector y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) y[static_cast<std::size_t>(cols[k])] += vals[k] * xi;
  }
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "dot: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double symmetry_defect(const SparseMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  const auto offsets = m.row_offsets();
  const auto cols = m.columns();
  const auto vals = m.values();
  double scale = 0.0;
  double defect = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      scale = std::max(scale, std::abs(vals[k]));
      defect = std::max(defect, std::abs(vals[k] - m.coeff(static_cast<std::size_t>(cols[k]), i)));
    }
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

}  // namespace cascadic
