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

#include "gce/training/grad_suite.h"

#include "gce/data/dataset.h"
#include "gce/embeddings/features.h"
#include "gce/graph/graph.h"
#include "gce/training/training.h"

namespace gce {

namespace {

// user, item, context
const std::vector<InteractionRecord> kToy = {
  {0, 0, {1}, 1}, {0, 1, {0}, 2}, {0, 3, {2}, 3}, {1, 1, {0}, 4}, {1, 2, {1}, 5},
  {1, 0, {2}, 6}, {2, 3, {0}, 7}, {2, 2, {2}, 8}, {2, 1, {1}, 9}, {0, 2, {0}, 10},
};

Dataset toy_dataset() {
  Dataset ds;
  ds.schema = FieldSchema({{"user", 3}, {"item", 4}, {"ctx", 3}});
  ds.ids.resize(3);
  for (std::size_t f = 0; f < 3; ++f) {
    for (std::size_t i = 0; i < ds.schema[f].cardinality; ++i) ds.ids[f].intern(std::to_string(i));
  }
  ds.records = kToy;
  ds.has_timestamps = true;
  return ds;
}

}  // namespace

std::vector<GradSuiteEntry> run_gradient_suite(Activation activation, std::uint64_t seed) {
  const Dataset ds = toy_dataset();
  const NPartiteGraph graph = build_graph(ds.records, ds.schema);

  SideInfoMatrix genres;
  genres.field = FieldSchema::kItem;
  for (const char* g : {"a", "b", "c"}) genres.vocabulary.intern(g);
  genres.features = SparseMatrix::from_triplets(
    4, 3, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}, {3, 0, 1.0}, {3, 2, 1.0}});
  const NodeFeatureMatrix free_features = compose_features(graph.indexer, {});
  const std::vector<SideInfoMatrix> side{genres};
  const NodeFeatureMatrix si_features = compose_features(graph.indexer, side);

  const PositiveIndex index(ds.records, 4, NegativeKey::user_context);
  std::vector<std::size_t> order(ds.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng neg_rng = Rng(seed).substream("negatives");
  const BprBatch batch = make_bpr_batch(ds.records, order, graph.indexer, index, 1, neg_rng);

  std::vector<GradSuiteEntry> out;
  for (HeadKind head : {HeadKind::mf, HeadKind::fm, HeadKind::ncf}) {
    for (ProviderKind provider : {ProviderKind::table, ProviderKind::gce, ProviderKind::gce_si}) {
      ModelOptions mo;
      mo.head = head;
      mo.provider = provider;
      mo.embedding.dim = 4;
      mo.embedding.activation = activation;
      mo.ncf_hidden = {5, 3};
      Rng init = Rng(seed).substream("init");
      const NodeFeatureMatrix* feats = provider == ProviderKind::gce_si ? &si_features : &free_features;
      Model model(mo, graph, feats, init);
      // Zero-initialised biases would leave the bias gradient path untested
      // at a degenerate point; perturb them.
      Rng jitter = Rng(seed).substream("jitter");
      for (Parameter* p : model.parameters()) {
        if (p->name.find("bias") != std::string::npos || p->name == "fm.w0") {
          for (double& v : p->value.values()) v = jitter.uniform(-0.1, 0.1);
        }
      }
      auto loss = [&](ad::Tape& tape) {
        ad::Var g = model.node_embeddings(tape, ForwardContext{});
        return bpr_loss(model.score(tape, g, batch.positive), model.score(tape, g, batch.negative));
      };
      const auto params = model.parameters();
      out.push_back({head, provider, check_gradient(loss, params)});
    }
  }
  return out;
}

}  // namespace gce
