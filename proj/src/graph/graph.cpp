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

#include "gce/graph/graph.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "gce/error.h"

namespace gce {

NPartiteGraph build_graph(std::span<const InteractionRecord> records, const FieldSchema& schema,
                          const GraphOptions& options) {
  schema.require_nonempty();
  NPartiteGraph g;
  g.schema = schema;
  g.indexer = NodeIndexer(schema);
  const std::size_t n = g.indexer.total();
  const std::size_t fields = schema.size();

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(records.size() * fields * (fields - 1) / 2);
  std::vector<std::size_t> nodes(fields);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const InteractionRecord& rec = records[r];
    if (rec.field_count() != fields) {
      throw IndexError("record " + std::to_string(r) + " has " +
                       std::to_string(rec.field_count()) + " fields, schema has " +
                       std::to_string(fields));
    }
    for (std::size_t f = 0; f < fields; ++f) {
      const std::size_t local = rec.field_id(f);
      if (local >= schema[f].cardinality) {
        throw IndexError("record " + std::to_string(r) + ": " + schema[f].name + " id " +
                         std::to_string(local) + " >= cardinality " +
                         std::to_string(schema[f].cardinality));
      }
      nodes[f] = g.indexer.offset(f) + local;
    }
    for (std::size_t a = 0; a < fields; ++a) {
      for (std::size_t b = a + 1; b < fields; ++b) {
        if (!options.context_edges && a >= 2 && b >= 2) continue;
        edges.emplace_back(nodes[a], nodes[b]);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<Triplet> entries;
  entries.reserve(edges.size() * 2);
  g.degrees.assign(n, 0);
  for (const auto& [p, q] : edges) {
    entries.push_back({p, q, 1.0});
    entries.push_back({q, p, 1.0});
    g.degrees[p]++;
    g.degrees[q]++;
  }
  g.adjacency = SparseMatrix::from_triplets(n, n, std::move(entries));
  g.normalized = normalize(g.adjacency, g.degrees);
  return g;
}

SparseMatrix normalize(const SparseMatrix& adjacency, std::span<const std::size_t> degrees) {
  const std::size_t n = adjacency.rows();
  if (adjacency.cols() != n || degrees.size() != n) {
    throw ShapeError("normalize: adjacency must be square and match the degree vector");
  }
  std::vector<double> inv_sqrt(n);
  for (std::size_t p = 0; p < n; ++p) {
    inv_sqrt[p] = 1.0 / std::sqrt(static_cast<double>(degrees[p]) + 1.0);
  }
  std::vector<Triplet> entries;
  entries.reserve(adjacency.nnz() + n);
  for (std::size_t p = 0; p < n; ++p) {
    auto cols = adjacency.row_cols(p);
    auto vals = adjacency.row_values(p);
    bool diag_seen = false;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t q = cols[k];
      double a = vals[k];
      if (q == p) {
        a += 1.0;
        diag_seen = true;
      }
      entries.push_back({p, q, a * inv_sqrt[p] * inv_sqrt[q]});
    }
    if (!diag_seen) entries.push_back({p, p, 1.0 / (static_cast<double>(degrees[p]) + 1.0)});
  }
  return SparseMatrix::from_triplets(n, n, std::move(entries));
}

void write_edge_list(const NPartiteGraph& graph, std::ostream& out) {
  const SparseMatrix& a = graph.adjacency;
  for (std::size_t p = 0; p < a.rows(); ++p) {
    for (std::size_t q : a.row_cols(p)) {
      if (p < q) out << p << ' ' << q << '\n';
    }
  }
}

}  // namespace gce
