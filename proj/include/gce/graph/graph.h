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
#include <ostream>
#include <span>
#include <vector>

#include "gce/data/record.h"
#include "gce/graph/schema.h"
#include "gce/numerics/sparse_matrix.h"

namespace gce {

struct GraphOptions {
  // Connect context_i with context_j (i != j) for every record. User and item
  // nodes always connect to everything else in the record.
  bool context_edges = true;
};

// N-partite interaction graph over the global node space.
struct NPartiteGraph {
  FieldSchema schema;
  NodeIndexer indexer;
  SparseMatrix adjacency;           // binary, symmetric, zero diagonal
  std::vector<std::size_t> degrees; // row sums of adjacency
  SparseMatrix normalized;          // D^-1/2 (A + I) D^-1/2, D = diag(degrees) + I

  std::size_t node_count() const { return indexer.total(); }
  std::size_t edge_count() const { return adjacency.nnz() / 2; }
  std::size_t field_of(std::size_t node) const { return indexer.local_of(node).field; }
};

// Builds the graph from training records only. Every pair of distinct fields
// present in a record becomes one undirected binary edge; repeats collapse.
// Throws IndexError naming the field and record index on out-of-range ids.
NPartiteGraph build_graph(std::span<const InteractionRecord> records, const FieldSchema& schema,
                          const GraphOptions& options = {});

// Symmetric normalization with self loops. Entry (p, q) of the result is
// 1/sqrt((N_p + 1)(N_q + 1)) for edges and 1/(N_p + 1) on the diagonal.
SparseMatrix normalize(const SparseMatrix& adjacency, std::span<const std::size_t> degrees);

// Debug dump: one "p q" line per undirected edge, p < q, global ids.
void write_edge_list(const NPartiteGraph& graph, std::ostream& out);

}  // namespace gce
