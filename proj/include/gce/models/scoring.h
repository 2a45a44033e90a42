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

#include <span>
#include <vector>

#include "gce/numerics/dense_matrix.h"

namespace gce {

using EmbeddingRows = std::span<const std::span<const double>>;

// Sum over dimensions of the elementwise product of all field embeddings.
// With two fields this is their inner product.
double score_mf(EmbeddingRows embeddings);

// Sum of inner products over all unordered pairs, by double loop.
double fm_pair_sum(EmbeddingRows embeddings);
// Same quantity as 0.5 * (||sum g||^2 - sum ||g||^2), O(F d).
double fm_pair_sum_identity(EmbeddingRows embeddings);

// Global bias + biases of the active nodes + pairwise interactions.
double score_fm(double w0, std::span<const double> active_biases, EmbeddingRows embeddings);

// Fully connected stack with rectifiers between layers and a linear output.
struct Mlp {
  std::vector<DenseMatrix> weights;  // in x out
  std::vector<DenseMatrix> biases;   // 1 x out

  double forward(std::span<const double> input) const;
  std::size_t input_dim() const { return weights.empty() ? 0 : weights.front().rows(); }
};

// FM score plus the MLP applied to the concatenated field embeddings.
double score_ncf(double w0, std::span<const double> active_biases, EmbeddingRows embeddings,
                 const Mlp& mlp);

}  // namespace gce
