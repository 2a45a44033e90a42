/*
 * Copyright 2026 The GCE Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gce/numerics/sparse_matrix.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gce/error.h"

namespace gce {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
  : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw IndexError("SparseMatrix: entry (" + std::to_string(t.row) + ", " +
                       std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
    if (!std::isfinite(t.value)) throw NumericError("SparseMatrix: non-finite entry");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  m.col_index_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
      throw ShapeError("SparseMatrix: duplicate entry (" + std::to_string(entries[i].row) + ", " +
                       std::to_string(entries[i].col) + ")");
    }
    m.row_ptr_[entries[i].row + 1]++;
    m.col_index_.push_back(entries[i].col);
    m.values_.push_back(entries[i].value);
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw IndexError("SparseMatrix::at out of range");
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_index_[k]) = values_[k];
  }
  return d;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      t.push_back({r, col_index_[k], values_[k]});
    }
  }
  return t;
}

SparseMatrix SparseMatrix::transpose() const {
  auto t = triplets();
  for (auto& e : t) std::swap(e.row, e.col);
  return from_triplets(cols_, rows_, std::move(t));
}

SparseMatrix SparseMatrix::column_slice(std::size_t col_begin, std::size_t col_end) const {
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_index_[k] >= col_begin && col_index_[k] < col_end) {
        t.push_back({r, col_index_[k], values_[k]});
      }
    }
  }
  return from_triplets(rows_, cols_, std::move(t));
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.cols() != d.rows()) {
    throw ShapeError("spmm: " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                     " * " + std::to_string(d.rows()) + "x" + std::to_string(d.cols()));
  }
  const std::size_t m = d.cols();
  DenseMatrix out(s.rows(), m);
  const auto ptr = s.row_ptr();
  const auto cols = s.col_index();
  const auto vals = s.values();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double* orow = out.data() + r * m;
    for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) {
      const double v = vals[k];
      const double* drow = d.data() + cols[k] * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += v * drow[j];
    }
  }
  return out;
}

DenseMatrix spmm_tn(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.rows() != d.rows()) {
    throw ShapeError("spmm_tn: (" + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                     ")^T * " + std::to_string(d.rows()) + "x" + std::to_string(d.cols()));
  }
  const std::size_t m = d.cols();
  DenseMatrix out(s.cols(), m);
  const auto ptr = s.row_ptr();
  const auto cols = s.col_index();
  const auto vals = s.values();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    const double* drow = d.data() + r * m;
    for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) {
      const double v = vals[k];
      double* orow = out.data() + cols[k] * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += v * drow[j];
    }
  }
  return out;
}

}  // namespace gce
