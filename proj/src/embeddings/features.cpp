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

#include "gce/embeddings/features.h"

#include <vector>

#include "gce/error.h"

namespace gce {

NodeFeatureMatrix compose_features(const NodeIndexer& indexer,
                                   std::span<const SideInfoMatrix> side_info) {
  NodeFeatureMatrix nf;
  const std::size_t nodes = indexer.total();
  if (side_info.empty()) {
    nf.free_input = true;
    nf.input_dim = nodes;
    return nf;
  }
  std::vector<Triplet> entries;
  entries.reserve(nodes);
  for (std::size_t p = 0; p < nodes; ++p) entries.push_back({p, p, 1.0});
  std::size_t col = nodes;
  for (const SideInfoMatrix& si : side_info) {
    if (si.field >= indexer.field_count()) {
      throw ShapeError("compose_features: side info for unknown field " + std::to_string(si.field));
    }
    if (si.features.rows() != indexer.cardinality(si.field)) {
      throw ShapeError("compose_features: side info has " + std::to_string(si.features.rows()) +
                       " rows, field has " + std::to_string(indexer.cardinality(si.field)));
    }
    const std::size_t offset = indexer.offset(si.field);
    for (const Triplet& t : si.features.triplets()) {
      entries.push_back({offset + t.row, col + t.col, t.value});
    }
    col += si.features.cols();
  }
  nf.free_input = false;
  nf.input_dim = col;
  nf.side_vocabulary = col - nodes;
  nf.z = SparseMatrix::from_triplets(nodes, col, std::move(entries));
  return nf;
}

}  // namespace gce
