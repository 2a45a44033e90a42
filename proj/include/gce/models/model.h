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
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gce/embeddings/provider.h"
#include "gce/models/scoring.h"

namespace gce {

enum class HeadKind { mf, fm, ncf };

std::string to_string(HeadKind h);
HeadKind parse_head(const std::string& s);

struct ModelOptions {
  HeadKind head = HeadKind::fm;
  ProviderKind provider = ProviderKind::table;
  EmbeddingOptions embedding;
  std::vector<std::size_t> ncf_hidden{128, 64};
};

// Global node ids of one candidate interaction, one per schema field.
struct ScoreRequest {
  std::vector<std::size_t> nodes;
};

// Field-major batch: fields[f][b] is the node of field f in request b.
struct FieldBatch {
  std::vector<std::vector<std::size_t>> fields;

  std::size_t size() const { return fields.empty() ? 0 : fields.front().size(); }
  // Throws ShapeError when a request does not have exactly `field_count` ids.
  static FieldBatch from_requests(std::span<const ScoreRequest> requests, std::size_t field_count);
};

// Frozen copy of everything needed to score: node embeddings after the
// provider, biases and MLP. Safe for concurrent reads.
class ScoringSnapshot {
 public:
  HeadKind head = HeadKind::fm;
  NodeIndexer indexer;
  DenseMatrix embeddings;     // |V| x d
  std::vector<double> bias;   // |V|, empty for MF
  double w0 = 0.0;
  Mlp mlp;                    // NCF only
  DenseMatrix projection;     // NCF: row p = g_p times the first-layer block of p's field

  double score(std::span<const std::size_t> nodes) const;
  // Scores `nodes` with the item slot replaced by each item in `items`
  // (field-local ids). out.size() must equal items.size().
  void score_items(std::span<const std::size_t> nodes, std::span<const std::uint32_t> items,
                   std::span<double> out) const;
};

// Scoring head (MF, FM or NCF) on top of an embedding provider.
class Model {
 public:
  Model(const ModelOptions& options, const NPartiteGraph& graph,
        const NodeFeatureMatrix* features, Rng& init);

  ad::Var node_embeddings(ad::Tape& tape, const ForwardContext& ctx);
  // Batch scores (B x 1) from embeddings produced by node_embeddings on the same tape.
  ad::Var score(ad::Tape& tape, ad::Var embeddings, const FieldBatch& batch);
  // Evaluation-mode scores through the tape path.
  std::vector<double> score_batch(std::span<const ScoreRequest> requests);

  ScoringSnapshot snapshot();
  std::vector<Parameter*> parameters();
  std::size_t trainable_count();

  // "<head>/<provider>"
  std::string tag() const;
  void save(std::ostream& out);
  // Throws CheckpointError when tag, names or shapes differ from this model.
  void load(std::istream& in);

  const ModelOptions& options() const { return options_; }
  const NodeIndexer& indexer() const { return indexer_; }
  std::size_t field_count() const { return indexer_.field_count(); }
  EmbeddingProvider& provider() { return *provider_; }
  Parameter& global_bias() { return w0_; }
  Parameter& node_bias() { return bias_; }
  std::vector<Parameter>& mlp_parameters() { return mlp_; }

 private:
  ad::Var fm_part(ad::Tape& tape, const std::vector<ad::Var>& fields, const FieldBatch& batch);

  ModelOptions options_;
  NodeIndexer indexer_;
  std::unique_ptr<EmbeddingProvider> provider_;
  Parameter w0_;
  Parameter bias_;
  std::vector<Parameter> mlp_;  // weight, bias per layer
};

}  // namespace gce
