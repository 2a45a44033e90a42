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

#include "gce/models/model.h"

#include <algorithm>
#include <array>

#include "gce/embeddings/checkpoint.h"
#include "gce/error.h"

namespace gce {

std::string to_string(HeadKind h) {
  switch (h) {
    case HeadKind::mf: return "mf";
    case HeadKind::fm: return "fm";
    case HeadKind::ncf: return "ncf";
  }
  return "?";
}

HeadKind parse_head(const std::string& s) {
  if (s == "mf") return HeadKind::mf;
  if (s == "fm") return HeadKind::fm;
  if (s == "ncf") return HeadKind::ncf;
  throw ConfigError("unknown model '" + s + "' (expected mf|fm|ncf)");
}

FieldBatch FieldBatch::from_requests(std::span<const ScoreRequest> requests,
                                     std::size_t field_count) {
  FieldBatch b;
  b.fields.assign(field_count, {});
  for (auto& f : b.fields) f.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (requests[i].nodes.size() != field_count) {
      throw ShapeError("score batch: request " + std::to_string(i) + " has " +
                       std::to_string(requests[i].nodes.size()) + " fields, expected " +
                       std::to_string(field_count));
    }
    for (std::size_t f = 0; f < field_count; ++f) b.fields[f].push_back(requests[i].nodes[f]);
  }
  return b;
}

Model::Model(const ModelOptions& options, const NPartiteGraph& graph,
             const NodeFeatureMatrix* features, Rng& init)
  : options_(options), indexer_(graph.indexer) {
  provider_ = make_provider(options.provider, graph, features, options.embedding, init);
  const std::size_t n = graph.node_count();
  if (options.head != HeadKind::mf) {
    w0_ = Parameter("fm.w0", DenseMatrix(1, 1));
    bias_ = Parameter("fm.bias", DenseMatrix(n, 1));
  }
  if (options.head == HeadKind::ncf) {
    std::size_t in = field_count() * options.embedding.dim;
    std::vector<std::size_t> sizes = options.ncf_hidden;
    sizes.push_back(1);
    for (std::size_t l = 0; l < sizes.size(); ++l) {
      const std::string prefix = "ncf.fc" + std::to_string(l + 1);
      mlp_.emplace_back(prefix + ".weight", glorot_uniform(in, sizes[l], in, sizes[l], init));
      mlp_.emplace_back(prefix + ".bias", DenseMatrix(1, sizes[l]));
      in = sizes[l];
    }
  }
}

ad::Var Model::node_embeddings(ad::Tape& tape, const ForwardContext& ctx) {
  return provider_->forward_all(tape, ctx);
}

ad::Var Model::fm_part(ad::Tape& tape, const std::vector<ad::Var>& fields,
                       const FieldBatch& batch) {
  ad::Var s;
  for (std::size_t p = 0; p < fields.size(); ++p) {
    for (std::size_t q = p + 1; q < fields.size(); ++q) {
      ad::Var dot = ad::row_dot(fields[p], fields[q]);
      s = s.valid() ? ad::add(s, dot) : dot;
    }
  }
  ad::Var bias = tape.parameter(bias_);
  for (const auto& ids : batch.fields) s = ad::add(s, ad::gather_rows(bias, ids));
  return ad::add_scalar(s, tape.parameter(w0_));
}

ad::Var Model::score(ad::Tape& tape, ad::Var embeddings, const FieldBatch& batch) {
  if (batch.fields.size() != field_count()) {
    throw ShapeError("score: batch has " + std::to_string(batch.fields.size()) +
                     " fields, model has " + std::to_string(field_count()));
  }
  for (const auto& ids : batch.fields) {
    if (ids.size() != batch.size()) throw ShapeError("score: ragged field batch");
  }
  std::vector<ad::Var> fields;
  for (const auto& ids : batch.fields) fields.push_back(ad::gather_rows(embeddings, ids));

  switch (options_.head) {
    case HeadKind::mf: {
      ad::Var prod = fields[0];
      for (std::size_t f = 1; f < fields.size(); ++f) prod = ad::hadamard(prod, fields[f]);
      return ad::row_sum(prod);
    }
    case HeadKind::fm:
      return fm_part(tape, fields, batch);
    case HeadKind::ncf: {
      ad::Var h = ad::concat_cols(fields);
      const std::size_t layers = mlp_.size() / 2;
      for (std::size_t l = 0; l < layers; ++l) {
        h = ad::add_row(ad::matmul(h, tape.parameter(mlp_[2 * l])), tape.parameter(mlp_[2 * l + 1]));
        if (l + 1 < layers) h = ad::relu(h);
      }
      return ad::add(fm_part(tape, fields, batch), h);
    }
  }
  throw ConfigError("unknown head");
}

std::vector<double> Model::score_batch(std::span<const ScoreRequest> requests) {
  if (requests.empty()) return {};
  const FieldBatch batch = FieldBatch::from_requests(requests, field_count());
  ad::Tape tape;
  ad::Var s = score(tape, node_embeddings(tape, ForwardContext{}), batch);
  return {s.value().values().begin(), s.value().values().end()};
}

ScoringSnapshot Model::snapshot() {
  ScoringSnapshot snap;
  snap.head = options_.head;
  snap.indexer = indexer_;
  snap.embeddings = provider_->compute_all();
  if (options_.head != HeadKind::mf) {
    snap.w0 = w0_.value(0, 0);
    snap.bias.assign(bias_.value.values().begin(), bias_.value.values().end());
  }
  if (options_.head == HeadKind::ncf) {
    for (std::size_t l = 0; l < mlp_.size() / 2; ++l) {
      snap.mlp.weights.push_back(mlp_[2 * l].value);
      snap.mlp.biases.push_back(mlp_[2 * l + 1].value);
    }
    // Per-node contribution to the first hidden layer.
    const DenseMatrix& w1 = snap.mlp.weights.front();
    const std::size_t d = snap.embeddings.cols();
    const std::size_t h1 = w1.cols();
    snap.projection = DenseMatrix(snap.embeddings.rows(), h1);
    for (std::size_t p = 0; p < snap.embeddings.rows(); ++p) {
      const std::size_t f = indexer_.local_of(p).field;
      auto e = snap.embeddings.row(p);
      auto out = snap.projection.row(p);
      for (std::size_t k = 0; k < d; ++k) {
        const auto wr = w1.row(f * d + k);
        for (std::size_t j = 0; j < h1; ++j) out[j] += e[k] * wr[j];
      }
    }
  }
  return snap;
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> ps = provider_->parameters();
  if (options_.head != HeadKind::mf) {
    ps.push_back(&w0_);
    ps.push_back(&bias_);
  }
  for (auto& p : mlp_) ps.push_back(&p);
  return ps;
}

std::size_t Model::trainable_count() {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->count();
  return n;
}

std::string Model::tag() const {
  return to_string(options_.head) + "/" + to_string(options_.provider);
}

void Model::save(std::ostream& out) {
  const auto ps = parameters();
  std::vector<const Parameter*> cps(ps.begin(), ps.end());
  write_checkpoint(out, tag(), cps);
}

void Model::load(std::istream& in) {
  Checkpoint ck = read_checkpoint(in);
  if (ck.tag != tag()) {
    throw CheckpointError("checkpoint is for model '" + ck.tag + "', expected '" + tag() + "'");
  }
  auto ps = parameters();
  if (ck.tensors.size() != ps.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(ck.tensors.size()) +
                          " tensors, model has " + std::to_string(ps.size()));
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Parameter& t = ck.tensors[i];
    if (t.name != ps[i]->name || !t.value.same_shape(ps[i]->value)) {
      throw CheckpointError("checkpoint tensor '" + t.name + "' does not match '" + ps[i]->name +
                            "'");
    }
  }
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->value = std::move(ck.tensors[i].value);
}

namespace {

// Layers after the first: rectify `hidden`, then run the remaining stack.
double mlp_tail(const Mlp& mlp, std::vector<double>& hidden, std::vector<double>& next) {
  if (mlp.weights.size() == 1) return hidden[0];
  for (std::size_t l = 1; l < mlp.weights.size(); ++l) {
    for (double& v : hidden) v = std::max(v, 0.0);
    const DenseMatrix& w = mlp.weights[l];
    const auto b = mlp.biases[l].values();
    next.assign(b.begin(), b.end());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double x = hidden[i];
      if (x == 0.0) continue;
      const auto wr = w.row(i);
      for (std::size_t j = 0; j < w.cols(); ++j) next[j] += x * wr[j];
    }
    hidden.swap(next);
  }
  return hidden[0];
}

}  // namespace

double ScoringSnapshot::score(std::span<const std::size_t> nodes) const {
  std::array<std::span<const double>, 16> rows_buf;
  if (nodes.size() > rows_buf.size()) throw ShapeError("score: too many fields");
  for (std::size_t f = 0; f < nodes.size(); ++f) rows_buf[f] = embeddings.row(nodes[f]);
  const EmbeddingRows rows(rows_buf.data(), nodes.size());
  if (head == HeadKind::mf) return score_mf(rows);

  std::array<double, 16> b{};
  for (std::size_t f = 0; f < nodes.size(); ++f) b[f] = bias[nodes[f]];
  const double fm = score_fm(w0, std::span<const double>(b.data(), nodes.size()), rows);
  if (head == HeadKind::fm) return fm;

  const auto b1 = mlp.biases.front().values();
  std::vector<double> hidden(b1.begin(), b1.end());
  std::vector<double> next;
  for (std::size_t node : nodes) {
    const auto pr = projection.row(node);
    for (std::size_t j = 0; j < hidden.size(); ++j) hidden[j] += pr[j];
  }
  return fm + mlp_tail(mlp, hidden, next);
}

void ScoringSnapshot::score_items(std::span<const std::size_t> nodes,
                                  std::span<const std::uint32_t> items,
                                  std::span<double> out) const {
  if (out.size() != items.size()) throw ShapeError("score_items: output size mismatch");
  if (nodes.size() < 2) throw ShapeError("score_items: need at least two fields");
  const std::size_t item_offset = indexer.offset(FieldSchema::kItem);
  const std::size_t item_card = indexer.cardinality(FieldSchema::kItem);
  for (std::uint32_t it : items) {
    if (it >= item_card) throw IndexError("score_items: item " + std::to_string(it) + " out of range");
  }
  const std::size_t d = embeddings.cols();

  // Everything not involving the item slot is computed once.
  if (head == HeadKind::mf) {
    std::vector<double> prod(d, 1.0);
    for (std::size_t f = 0; f < nodes.size(); ++f) {
      if (f == FieldSchema::kItem) continue;
      const auto e = embeddings.row(nodes[f]);
      for (std::size_t k = 0; k < d; ++k) prod[k] *= e[k];
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto e = embeddings.row(item_offset + items[i]);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += prod[k] * e[k];
      out[i] = s;
    }
    return;
  }

  std::vector<double> sum(d, 0.0);
  std::array<std::span<const double>, 16> fixed_rows;
  std::size_t nfixed = 0;
  double constant = w0;
  for (std::size_t f = 0; f < nodes.size(); ++f) {
    if (f == FieldSchema::kItem) continue;
    const auto e = embeddings.row(nodes[f]);
    for (std::size_t k = 0; k < d; ++k) sum[k] += e[k];
    constant += bias[nodes[f]];
    fixed_rows.at(nfixed++) = e;
  }
  constant += fm_pair_sum(EmbeddingRows(fixed_rows.data(), nfixed));

  std::vector<double> hidden0, hidden, next;
  if (head == HeadKind::ncf) {
    const auto b1 = mlp.biases.front().values();
    hidden0.assign(b1.begin(), b1.end());
    for (std::size_t f = 0; f < nodes.size(); ++f) {
      if (f == FieldSchema::kItem) continue;
      const auto pr = projection.row(nodes[f]);
      for (std::size_t j = 0; j < hidden0.size(); ++j) hidden0[j] += pr[j];
    }
  }

  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::size_t node = item_offset + items[i];
    const auto e = embeddings.row(node);
    double s = constant + bias[node];
    for (std::size_t k = 0; k < d; ++k) s += sum[k] * e[k];
    if (head == HeadKind::ncf) {
      hidden = hidden0;
      const auto pr = projection.row(node);
      for (std::size_t j = 0; j < hidden.size(); ++j) hidden[j] += pr[j];
      s += mlp_tail(mlp, hidden, next);
    }
    out[i] = s;
  }
}

}  // namespace gce
