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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gce/numerics/dense_matrix.h"

namespace gce {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed-row matrix with column-sorted rows. Immutable once built.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  // Empty (all-zero) rows x cols matrix.
  SparseMatrix(std::size_t rows, std::size_t cols);

  // Entries may come in any order. Duplicate (row, col) pairs, out-of-range
  // indices and non-finite values are rejected.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_index() const { return col_index_; }
  std::span<const double> values() const { return values_; }
  std::span<const std::size_t> row_cols(std::size_t r) const {
    return {col_index_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  // Value at (r, c); zero when not stored.
  double at(std::size_t r, std::size_t c) const;

  DenseMatrix to_dense() const;
  SparseMatrix transpose() const;
  std::vector<Triplet> triplets() const;

  // Keeps only entries whose column lies in [col_begin, col_end).
  SparseMatrix column_slice(std::size_t col_begin, std::size_t col_end) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_index_;
  std::vector<double> values_;
};

// s * d, visiting stored entries only.
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d);
// transpose(s) * d, by scattering each stored entry.
DenseMatrix spmm_tn(const SparseMatrix& s, const DenseMatrix& d);

}  // namespace gce
