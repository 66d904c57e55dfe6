#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "cslsq/vector.hpp"

namespace cslsq {

// Compressed sparse row matrix. Invariants (enforced by the builders below):
// row_ptr nondecreasing with row_ptr[0] = 0 and row_ptr[rows] = nnz; within
// each row, column indices strictly increasing; no duplicate entries.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
};

inline void validate_csr(const CsrMatrix& A) {
  if (A.row_ptr.size() != A.rows + 1 || A.row_ptr.front() != 0 ||
      A.row_ptr.back() != A.values.size() ||
      A.col_idx.size() != A.values.size())
    throw std::invalid_argument("csr: malformed index arrays");
  for (std::size_t i = 0; i < A.rows; ++i) {
    if (A.row_ptr[i] > A.row_ptr[i + 1])
      throw std::invalid_argument("csr: row_ptr not nondecreasing");
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
      if (A.col_idx[p] >= A.cols)
        throw std::invalid_argument("csr: column index out of range");
      if (p > A.row_ptr[i] && A.col_idx[p] <= A.col_idx[p - 1])
        throw std::invalid_argument("csr: columns not strictly increasing");
    }
  }
}

// Build from (row, col, value) triplets; sorts, rejects duplicates.
inline CsrMatrix csr_from_triplets(
    std::size_t rows, std::size_t cols,
    std::vector<std::tuple<std::size_t, std::size_t, double>> t) {
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                            : std::get<1>(a) < std::get<1>(b);
  });
  CsrMatrix A;
  A.rows = rows;
  A.cols = cols;
  A.row_ptr.assign(rows + 1, 0);
  A.col_idx.reserve(t.size());
  A.values.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto [i, j, v] = t[k];
    if (i >= rows || j >= cols)
      throw std::invalid_argument("csr_from_triplets: index out of range");
    if (k > 0 && i == std::get<0>(t[k - 1]) && j == std::get<1>(t[k - 1]))
      throw std::invalid_argument("csr_from_triplets: duplicate entry");
    A.col_idx.push_back(j);
    A.values.push_back(v);
    ++A.row_ptr[i + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) A.row_ptr[i + 1] += A.row_ptr[i];
  return A;
}

// Incremental row-by-row assembly (entries within a row may arrive unsorted).
class CsrBuilder {
 public:
  CsrBuilder(std::size_t rows, std::size_t cols) : cols_(cols) {
    A_.rows = rows;
    A_.cols = cols;
    A_.row_ptr.reserve(rows + 1);
  }

  void add_row(const std::vector<std::pair<std::size_t, double>>& entries) {
    row_.assign(entries.begin(), entries.end());
    std::sort(row_.begin(), row_.end());
    for (std::size_t k = 0; k < row_.size(); ++k) {
      if (row_[k].first >= cols_)
        throw std::invalid_argument("CsrBuilder: column out of range");
      if (k > 0 && row_[k].first == row_[k - 1].first)
        throw std::invalid_argument("CsrBuilder: duplicate column in row");
      A_.col_idx.push_back(row_[k].first);
      A_.values.push_back(row_[k].second);
    }
    A_.row_ptr.push_back(A_.values.size());
    ++nrows_;
  }

  CsrMatrix take() {
    if (nrows_ != A_.rows)
      throw std::logic_error("CsrBuilder: row count mismatch");
    return std::move(A_);
  }

 private:
  std::size_t cols_;
  std::size_t nrows_ = 0;
  CsrMatrix A_;
  std::vector<std::pair<std::size_t, double>> row_;
};

// y = A x, row-sequential accumulation (deterministic)
inline Vector spmv(const CsrMatrix& A, const Vector& x) {
  if (x.size() != A.cols) throw std::invalid_argument("spmv: size mismatch");
  Vector y(A.rows);
  for (std::size_t i = 0; i < A.rows; ++i) {
    double s = 0.0;
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
      s += A.values[p] * x[A.col_idx[p]];
    y[i] = s;
  }
  return y;
}

// x = A^T y, row-sequential scatter (deterministic)
inline Vector spmv_t(const CsrMatrix& A, const Vector& y) {
  if (y.size() != A.rows) throw std::invalid_argument("spmv_t: size mismatch");
  Vector x(A.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    const double yi = y[i];
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
      x[A.col_idx[p]] += A.values[p] * yi;
  }
  return x;
}

}  // namespace cslsq
