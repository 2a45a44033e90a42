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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gce/embeddings/features.h"
#include "gce/graph/graph.h"
#include "gce/numerics/autodiff.h"
#include "gce/random.h"

namespace gce {

enum class Activation { identity, relu };
enum class ProviderKind { table, gce, gce_si };

std::string to_string(Activation a);
std::string to_string(ProviderKind p);
Activation parse_activation(const std::string& s);
ProviderKind parse_provider(const std::string& s);

struct EmbeddingOptions {
  std::size_t dim = 64;
  Activation activation = Activation::relu;
  double dropout = 0.0;
  std::size_t layers = 1;
  // One W shared by all fields; otherwise one W per source field and layer.
  bool shared_weight = true;
};

struct ForwardContext {
  bool training = false;
  Rng* dropout_rng = nullptr;
};

// Inverted dropout mask: each entry is 0 with probability `rate`, otherwise
// 1/(1 - rate). Throws ConfigError unless 0 <= rate < 1.
DenseMatrix dropout_mask(double rate, std::size_t rows, std::size_t cols, Rng& rng);
void validate_dropout(double rate);

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                           std::size_t fan_out, Rng& rng);

// Source of node representations for the scoring heads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // All |V| node embeddings as one |V| x d node.
  virtual ad::Var forward_all(ad::Tape& tape, const ForwardContext& ctx) = 0;
  virtual std::vector<Parameter*> parameters() = 0;
  virtual std::size_t node_count() const = 0;
  virtual std::size_t dim() const = 0;

  // Rows of forward_all for `ids`. Throws IndexError on ids >= node_count().
  ad::Var forward(ad::Tape& tape, std::span<const std::size_t> ids, const ForwardContext& ctx);
  // Evaluation-mode embeddings, no dropout.
  DenseMatrix compute_all();
};

// Plain lookup table.
class EmbeddingTable final : public EmbeddingProvider {
 public:
  EmbeddingTable(std::size_t nodes, std::size_t dim, Rng& init);

  ad::Var forward_all(ad::Tape& tape, const ForwardContext& ctx) override;
  std::vector<Parameter*> parameters() override { return {&table_}; }
  std::size_t node_count() const override { return table_.value.rows(); }
  std::size_t dim() const override { return table_.value.cols(); }

  Parameter& table() { return table_; }

 private:
  Parameter table_;
};

// Graph convolutional embedding: H1 = act(dropout(S * H) * W) over the
// normalized adjacency S, stacked `layers` times.
class GceLayer final : public EmbeddingProvider {
 public:
  GceLayer(const NPartiteGraph& graph, const NodeFeatureMatrix& features,
           const EmbeddingOptions& options, Rng& init);

  ad::Var forward_all(ad::Tape& tape, const ForwardContext& ctx) override;
  std::vector<Parameter*> parameters() override;
  std::size_t node_count() const override { return normalized_->rows(); }
  std::size_t dim() const override { return options_.dim; }

  // Free input H (no side info) or feature embedding E (side info).
  Parameter& input() { return input_; }
  // Weight of `layer`; `field` selects the per-field matrix when unshared.
  Parameter& weight(std::size_t layer, std::size_t field = 0);
  const EmbeddingOptions& options() const { return options_; }

 private:
  EmbeddingOptions options_;
  std::shared_ptr<const SparseMatrix> normalized_;
  std::vector<std::shared_ptr<const SparseMatrix>> field_slices_;
  std::shared_ptr<const SparseMatrix> features_;  // null for free input
  Parameter input_;
  std::vector<Parameter> weights_;  // layer-major, then field
};

std::unique_ptr<EmbeddingProvider> make_provider(ProviderKind kind, const NPartiteGraph& graph,
                                                 const NodeFeatureMatrix* features,
                                                 const EmbeddingOptions& options, Rng& init);

}  // namespace gce
