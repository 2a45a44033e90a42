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

#include "gce/embeddings/provider.h"

#include <cmath>

#include "gce/error.h"

namespace gce {

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

std::string to_string(ProviderKind p) {
  switch (p) {
    case ProviderKind::table: return "table";
    case ProviderKind::gce: return "gce";
    case ProviderKind::gce_si: return "gce-si";
  }
  return "?";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity" || s == "none") return Activation::identity;
  throw ConfigError("unknown activation '" + s + "' (expected relu|identity)");
}

ProviderKind parse_provider(const std::string& s) {
  if (s == "table") return ProviderKind::table;
  if (s == "gce") return ProviderKind::gce;
  if (s == "gce-si") return ProviderKind::gce_si;
  throw ConfigError("unknown provider '" + s + "' (expected table|gce|gce-si)");
}

void validate_dropout(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
}

DenseMatrix dropout_mask(double rate, std::size_t rows, std::size_t cols, Rng& rng) {
  validate_dropout(rate);
  DenseMatrix m(rows, cols, 1.0);
  if (rate == 0.0) return m;
  const double keep = 1.0 / (1.0 - rate);
  for (double& v : m.values()) v = rng.uniform01() < rate ? 0.0 : keep;
  return m;
}

DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                           std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
  return m;
}

ad::Var EmbeddingProvider::forward(ad::Tape& tape, std::span<const std::size_t> ids,
                                   const ForwardContext& ctx) {
  for (std::size_t id : ids) {
    if (id >= node_count()) {
      throw IndexError("embedding lookup: node " + std::to_string(id) + " >= " +
                       std::to_string(node_count()));
    }
  }
  return ad::gather_rows(forward_all(tape, ctx), ids);
}

DenseMatrix EmbeddingProvider::compute_all() {
  ad::Tape tape;
  return forward_all(tape, ForwardContext{}).value();
}

EmbeddingTable::EmbeddingTable(std::size_t nodes, std::size_t dim, Rng& init)
  : table_("embedding.table", glorot_uniform(nodes, dim, nodes, dim, init)) {}

ad::Var EmbeddingTable::forward_all(ad::Tape& tape, const ForwardContext&) {
  return tape.parameter(table_);
}

GceLayer::GceLayer(const NPartiteGraph& graph, const NodeFeatureMatrix& features,
                   const EmbeddingOptions& options, Rng& init)
  : options_(options),
    normalized_(std::make_shared<const SparseMatrix>(graph.normalized)) {
  validate_dropout(options.dropout);
  if (options.layers == 0) throw ConfigError("GCE needs at least one layer");
  const std::size_t n = graph.node_count();
  const std::size_t d = options.dim;
  if (features.free_input) {
    input_ = Parameter("gce.input", glorot_uniform(n, d, n, d, init));
  } else {
    if (features.z.rows() != n) throw ShapeError("GCE: feature matrix rows differ from |V|");
    features_ = std::make_shared<const SparseMatrix>(features.z);
    input_ = Parameter("gce.feature_embedding",
                       glorot_uniform(features.input_dim, d, features.input_dim, d, init));
  }
  const std::size_t per_layer = options.shared_weight ? 1 : graph.schema.size();
  if (!options.shared_weight) {
    for (std::size_t f = 0; f < graph.schema.size(); ++f) {
      field_slices_.push_back(std::make_shared<const SparseMatrix>(normalized_->column_slice(
        graph.indexer.offset(f), graph.indexer.offset(f) + graph.indexer.cardinality(f))));
    }
  }
  for (std::size_t l = 0; l < options.layers; ++l) {
    for (std::size_t f = 0; f < per_layer; ++f) {
      std::string name = "gce.weight." + std::to_string(l);
      if (!options.shared_weight) name += "." + graph.schema[f].name;
      weights_.emplace_back(name, glorot_uniform(d, d, d, d, init));
    }
  }
}

Parameter& GceLayer::weight(std::size_t layer, std::size_t field) {
  const std::size_t per_layer = options_.shared_weight ? 1 : field_slices_.size();
  return weights_.at(layer * per_layer + (options_.shared_weight ? 0 : field));
}

std::vector<Parameter*> GceLayer::parameters() {
  std::vector<Parameter*> ps{&input_};
  for (auto& w : weights_) ps.push_back(&w);
  return ps;
}

ad::Var GceLayer::forward_all(ad::Tape& tape, const ForwardContext& ctx) {
  ad::Var h = tape.parameter(input_);
  if (features_) h = ad::spmm(*features_, h);
  const bool drop = ctx.training && options_.dropout > 0.0;
  if (drop && ctx.dropout_rng == nullptr) throw ConfigError("GCE dropout needs an rng");
  auto dropped = [&](ad::Var agg) {
    if (!drop) return agg;
    return ad::mask(agg, dropout_mask(options_.dropout, agg.rows(), agg.cols(), *ctx.dropout_rng));
  };
  for (std::size_t l = 0; l < options_.layers; ++l) {
    ad::Var out;
    if (options_.shared_weight) {
      out = ad::matmul(dropped(ad::spmm(*normalized_, h)), tape.parameter(weight(l)));
    } else {
      for (std::size_t f = 0; f < field_slices_.size(); ++f) {
        ad::Var part =
          ad::matmul(dropped(ad::spmm(*field_slices_[f], h)), tape.parameter(weight(l, f)));
        out = out.valid() ? ad::add(out, part) : part;
      }
    }
    h = options_.activation == Activation::relu ? ad::relu(out) : out;
  }
  return h;
}

std::unique_ptr<EmbeddingProvider> make_provider(ProviderKind kind, const NPartiteGraph& graph,
                                                 const NodeFeatureMatrix* features,
                                                 const EmbeddingOptions& options, Rng& init) {
  switch (kind) {
    case ProviderKind::table:
      return std::make_unique<EmbeddingTable>(graph.node_count(), options.dim, init);
    case ProviderKind::gce: {
      NodeFeatureMatrix free = compose_features(graph.indexer, {});
      return std::make_unique<GceLayer>(graph, free, options, init);
    }
    case ProviderKind::gce_si:
      if (features == nullptr || features->free_input) {
        throw ConfigError("provider gce-si needs side information");
      }
      return std::make_unique<GceLayer>(graph, *features, options, init);
  }
  throw ConfigError("unknown provider");
}

}  // namespace gce
