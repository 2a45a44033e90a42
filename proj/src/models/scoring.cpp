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

#include "gce/models/scoring.h"

#include <algorithm>

#include "gce/error.h"

namespace gce {

namespace {

std::size_t common_dim(EmbeddingRows e) {
  if (e.empty()) return 0;
  const std::size_t d = e.front().size();
  for (const auto& row : e) {
    if (row.size() != d) throw ShapeError("scoring: field embeddings differ in size");
  }
  return d;
}

}  // namespace

double score_mf(EmbeddingRows e) {
  const std::size_t d = common_dim(e);
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double prod = e[0][k];
    for (std::size_t f = 1; f < e.size(); ++f) prod *= e[f][k];
    s += prod;
  }
  return s;
}

double fm_pair_sum(EmbeddingRows e) {
  const std::size_t d = common_dim(e);
  double s = 0.0;
  for (std::size_t p = 0; p < e.size(); ++p) {
    for (std::size_t q = p + 1; q < e.size(); ++q) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += e[p][k] * e[q][k];
      s += dot;
    }
  }
  return s;
}

double fm_pair_sum_identity(EmbeddingRows e) {
  const std::size_t d = common_dim(e);
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double total = 0.0, squares = 0.0;
    for (const auto& row : e) {
      total += row[k];
      squares += row[k] * row[k];
    }
    s += total * total - squares;
  }
  return 0.5 * s;
}

double score_fm(double w0, std::span<const double> active_biases, EmbeddingRows e) {
  double s = w0;
  for (double b : active_biases) s += b;
  return s + fm_pair_sum(e);
}

double Mlp::forward(std::span<const double> input) const {
  if (weights.empty()) return 0.0;
  std::vector<double> x(input.begin(), input.end());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const DenseMatrix& w = weights[l];
    if (w.rows() != x.size()) throw ShapeError("Mlp: input size differs from layer");
    std::vector<double> y(biases[l].values().begin(), biases[l].values().end());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      const auto wr = w.row(i);
      for (std::size_t j = 0; j < y.size(); ++j) y[j] += x[i] * wr[j];
    }
    if (l + 1 < weights.size()) {
      for (double& v : y) v = std::max(v, 0.0);
    }
    x = std::move(y);
  }
  return x.at(0);
}

double score_ncf(double w0, std::span<const double> active_biases, EmbeddingRows e,
                 const Mlp& mlp) {
  std::vector<double> concat;
  for (const auto& row : e) concat.insert(concat.end(), row.begin(), row.end());
  return score_fm(w0, active_biases, e) + mlp.forward(concat);
}

}  // namespace gce
