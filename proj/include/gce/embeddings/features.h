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

#include "gce/data/side_info.h"
#include "gce/graph/schema.h"
#include "gce/numerics/sparse_matrix.h"

namespace gce {

// Input features for the GCE layer. Without side information the layer input
// is a free trainable |V| x d matrix (equivalent to an identity Z times a
// trainable projection). With side information, Z = [I_|V| | multi-hot] and the
// layer input becomes Z * E with E trainable (input_dim x d).
struct NodeFeatureMatrix {
  bool free_input = true;
  SparseMatrix z;
  std::size_t input_dim = 0;
  std::size_t side_vocabulary = 0;
};

// Throws ShapeError when a side-info matrix does not match its field.
NodeFeatureMatrix compose_features(const NodeIndexer& indexer,
                                   std::span<const SideInfoMatrix> side_info);

}  // namespace gce
