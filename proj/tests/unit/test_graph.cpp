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

#include <cmath>
#include <sstream>

#include "doctest.h"

#include "gce/error.h"
#include "gce/graph/graph.h"
#include "support/checks.h"
#include "support/oracles.h"

using namespace gce;

namespace {

FieldSchema three(std::size_t m, std::size_t n, std::size_t c) {
  return FieldSchema({{"user", m}, {"item", n}, {"ctx", c}});
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("schema needs user and item") {
  CHECK_THROWS_AS(FieldSchema({{"user", 1}}), ConfigError);
  CHECK(three(2, 3, 4).total_nodes() == 9);
  CHECK(three(2, 3, 4).context_count() == 1);
}

TEST_CASE("indexer on the MovieLens shape") {
  const NodeIndexer ix(three(943, 1682, 1682));
  CHECK(ix.global_id(0, 0) == 0);
  CHECK(ix.global_id(1, 0) == 943);
  CHECK(ix.global_id(2, 0) == 2625);
  CHECK(ix.global_id(2, 1681) == ix.total() - 1);
  CHECK(ix.total() == 4307);
  CHECK_THROWS_AS(ix.global_id(0, 943), IndexError);
  CHECK_THROWS_AS(ix.global_id(3, 0), IndexError);
  CHECK_THROWS_AS(ix.local_of(4307), IndexError);
}

TEST_CASE("indexer round trip") {
  const NodeIndexer ix(three(3, 5, 2));
  for (std::size_t f = 0; f < 3; ++f) {
    for (std::size_t k = 0; k < ix.cardinality(f); ++k) {
      CHECK(ix.local_of(ix.global_id(f, k)) == NodeRef{f, k});
    }
  }
}

TEST_CASE("one interaction over three fields") {
  const std::vector<InteractionRecord> rs{{0, 0, {0}, {}}};
  const auto g = build_graph(rs, three(1, 1, 1));
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 3);
  for (std::size_t p = 0; p < 3; ++p) {
    CHECK(g.degrees[p] == 2);
    double row = 0.0;
    for (std::size_t q = 0; q < 3; ++q) {
      CHECK(g.adjacency.at(p, q) == (p == q ? 0.0 : 1.0));
      CHECK(g.normalized.at(p, q) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
      row += g.normalized.at(p, q);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("no records gives the identity") {
  const std::vector<InteractionRecord> none;
  const auto g = build_graph(none, three(2, 2, 1));
  CHECK(g.adjacency.nnz() == 0);
  CHECK(g.normalized.to_dense() == DenseMatrix::identity(5));
}

TEST_CASE("repeated records collapse") {
  std::vector<InteractionRecord> once{{0, 1, {0}, {}}};
  std::vector<InteractionRecord> five(5, once[0]);
  const auto a = build_graph(once, three(2, 2, 1));
  const auto b = build_graph(five, three(2, 2, 1));
  CHECK(a.adjacency.to_dense() == b.adjacency.to_dense());
  CHECK(a.normalized.to_dense() == b.normalized.to_dense());
  CHECK(a.degrees == b.degrees);
}

TEST_CASE("isolated node keeps a unit self weight") {
  const std::vector<InteractionRecord> rs{{0, 0, {0}, {}}};
  const auto g = build_graph(rs, three(2, 1, 1));
  CHECK(g.degrees[1] == 0);
  CHECK(g.normalized.row_cols(1).size() == 1);
  CHECK(g.normalized.at(1, 1) == 1.0);
}

TEST_CASE("disconnected cliques normalize block-diagonally") {
  const std::vector<InteractionRecord> rs{{0, 0, {0}, {}}, {1, 1, {1}, {}}};
  const auto g = build_graph(rs, three(2, 2, 2));
  const auto dense = g.normalized.to_dense();
  CHECK(max_abs_diff(dense, oracle::dense_normalize(g.adjacency.to_dense())) < 1e-15);
  const NodeIndexer& ix = g.indexer;
  for (std::size_t f = 0; f < 3; ++f) {
    for (std::size_t h = 0; h < 3; ++h) {
      CHECK(dense(ix.global_id(f, 0), ix.global_id(h, 1)) == 0.0);
    }
  }
}

TEST_CASE("out of range ids name record and field") {
  const std::vector<InteractionRecord> rs{{0, 0, {0}, {}}, {0, 0, {7}, {}}};
  try {
    build_graph(rs, three(1, 1, 2));
    FAIL("expected IndexError");
  } catch (const IndexError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("record 1") != std::string::npos);
    CHECK(msg.find("ctx") != std::string::npos);
  }
}

TEST_CASE("context edges can be switched off") {
  const FieldSchema s({{"user", 1}, {"item", 1}, {"a", 1}, {"b", 1}});
  const std::vector<InteractionRecord> rs{{0, 0, {0, 0}, {}}};
  CHECK(build_graph(rs, s).edge_count() == 6);
  const auto g = build_graph(rs, s, GraphOptions{false});
  CHECK(g.edge_count() == 5);
  CHECK(g.adjacency.at(2, 3) == 0.0);
}

TEST_CASE("edge list lists each undirected edge once") {
  const std::vector<InteractionRecord> rs{{0, 0, {0}, {}}};
  std::ostringstream out;
  write_edge_list(build_graph(rs, three(1, 1, 1)), out);
  CHECK(out.str() == "0 1\n0 2\n1 2\n");
}

TEST_CASE("random graphs against dense oracles") {
  const auto r = check::graph_oracles(20, 40);
  INFO(r.detail);
  CHECK(r.ok);
  CHECK(r.worst < 1e-12);
}

}  // TEST_SUITE
