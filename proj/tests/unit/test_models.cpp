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

#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"

#include "gce/error.h"
#include "gce/models/model.h"
#include "gce/numerics/gradcheck.h"
#include "support/checks.h"
#include "support/oracles.h"

using namespace gce;

namespace {

std::vector<std::span<const double>> rows_of(const std::vector<std::vector<double>>& v) {
  return {v.begin(), v.end()};
}

NPartiteGraph two_field_graph() {
  const std::vector<InteractionRecord> rs{{0, 0, {}, {}}, {0, 1, {}, {}}, {1, 1, {}, {}}};
  return build_graph(rs, FieldSchema({{"user", 2}, {"item", 2}}));
}

ModelOptions options(HeadKind head, std::size_t d, std::vector<std::size_t> hidden = {4, 3}) {
  ModelOptions o;
  o.head = head;
  o.embedding.dim = d;
  o.ncf_hidden = std::move(hidden);
  return o;
}

void set_table(Model& m, const DenseMatrix& v) {
  static_cast<EmbeddingTable&>(m.provider()).table().value = v;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("tensor MF") {
  const std::vector<std::vector<double>> two{{1, 2}, {3, 4}};
  CHECK(score_mf(rows_of(two)) == 11.0);
  const std::vector<std::vector<double>> three{{1, 2}, {3, 4}, {5, 6}};
  CHECK(score_mf(rows_of(three)) == 63.0);
  const std::vector<std::vector<double>> zero{{1, 2}, {0, 0}, {5, 6}};
  CHECK(score_mf(rows_of(zero)) == 0.0);
}

TEST_CASE("FM by hand") {
  const std::vector<double> biases{0.1, 0.1};
  const std::vector<std::vector<double>> zero{{0, 0}, {0, 0}};
  CHECK(score_fm(0.5, biases, rows_of(zero)) == doctest::Approx(0.7).epsilon(1e-15));
  const std::vector<std::vector<double>> g{{1, 0}, {1, 1}};
  CHECK(score_fm(0.5, biases, rows_of(g)) == doctest::Approx(1.7).epsilon(1e-15));
}

TEST_CASE("pair sum identity") {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 50; ++t) {
    const auto m = oracle::random_dense(2 + t % 5, 1 + t % 7, gen);
    std::vector<std::span<const double>> rows;
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    CHECK(std::abs(fm_pair_sum(rows) - fm_pair_sum_identity(rows)) <= 1e-10);
  }
}

TEST_CASE("FM against the literal indicator sum") {
  const auto out = check::fm_fidelity(22, 40);
  INFO(out.detail);
  CHECK(out.ok);
  CHECK(out.cases > 0);
}

TEST_CASE("NCF with a silent MLP is FM") {
  const std::vector<double> biases{0.1, 0.2, -0.3};
  const std::vector<std::vector<double>> g{{1, 0.5}, {-1, 1}, {0.25, 2}};
  Mlp mlp;
  mlp.weights = {DenseMatrix(6, 3), DenseMatrix(3, 1)};
  mlp.biases = {DenseMatrix(1, 3), DenseMatrix(1, 1)};
  CHECK(score_ncf(0.4, biases, rows_of(g), mlp) == score_fm(0.4, biases, rows_of(g)));
}

TEST_CASE("NCF with one hidden unit by hand") {
  const std::vector<double> biases{0.1, 0.1};
  const std::vector<std::vector<double>> g{{1, 0}, {1, 1}};
  Mlp mlp;
  mlp.weights = {DenseMatrix(4, 1, std::vector<double>{1, -1, 2, 0.5}), DenseMatrix(1, 1, 2.0)};
  mlp.biases = {DenseMatrix(1, 1, 0.25), DenseMatrix(1, 1, -1.0)};
  // hidden = relu(1 - 0 + 2 + 0.5 + 0.25) = 3.75, out = 2 * 3.75 - 1 = 6.5
  CHECK(score_ncf(0.5, biases, rows_of(g), mlp) == doctest::Approx(1.7 + 6.5).epsilon(1e-15));
  mlp.weights[0] = DenseMatrix(4, 1, std::vector<double>{-1, -1, -2, -0.5});
  // rectifier closes, only the output bias is left
  CHECK(score_ncf(0.5, biases, rows_of(g), mlp) == doctest::Approx(1.7 - 1.0).epsilon(1e-15));
}

TEST_CASE("model heads match the scalar formulas") {
  const auto g = two_field_graph();
  const auto emb = DenseMatrix::from_rows({{1, 0}, {0, 2}, {1, 1}, {3, -1}});
  for (HeadKind head : {HeadKind::mf, HeadKind::fm, HeadKind::ncf}) {
    Rng rng(1);
    Model m(options(head, 2), g, nullptr, rng);
    set_table(m, emb);
    if (head != HeadKind::mf) {
      m.global_bias().value(0, 0) = 0.5;
      for (std::size_t p = 0; p < 4; ++p) m.node_bias().value(p, 0) = 0.1 * (p + 1);
    }
    const std::vector<ScoreRequest> reqs{{{0, 2}}, {{1, 3}}, {{0, 3}}};
    const auto got = m.score_batch(reqs);
    const auto snap = m.snapshot();
    for (std::size_t b = 0; b < reqs.size(); ++b) {
      const auto& n = reqs[b].nodes;
      const std::vector<std::span<const double>> rows{emb.row(n[0]), emb.row(n[1])};
      const std::vector<double> biases{0.1 * (n[0] + 1), 0.1 * (n[1] + 1)};
      double expect = 0.0;
      if (head == HeadKind::mf) expect = score_mf(rows);
      if (head == HeadKind::fm) expect = score_fm(0.5, biases, rows);
      if (head == HeadKind::ncf) {
        Mlp mlp;
        auto& ps = m.mlp_parameters();
        for (std::size_t l = 0; l < ps.size(); l += 2) {
          mlp.weights.push_back(ps[l].value);
          mlp.biases.push_back(ps[l + 1].value);
        }
        expect = score_ncf(0.5, biases, rows, mlp);
      }
      CHECK(std::abs(got[b] - expect) <= 1e-12);
      CHECK(std::abs(snap.score(n) - expect) <= 1e-12);
    }
  }
}

TEST_CASE("score_batch shapes") {
  std::mt19937_64 gen(23);
  const auto inst = oracle::random_instance(gen, 3, 20, 10);
  const auto g = build_graph(inst.records, inst.schema);
  Rng rng(2);
  Model m(options(HeadKind::ncf, 4), g, nullptr, rng);
  const auto snap = m.snapshot();
  std::vector<ScoreRequest> reqs;
  for (int b = 0; b < 64; ++b) {
    ScoreRequest r;
    for (std::size_t f = 0; f < 3; ++f) {
      r.nodes.push_back(g.indexer.global_id(f, gen() % g.indexer.cardinality(f)));
    }
    reqs.push_back(r);
  }
  const auto batched = m.score_batch(reqs);
  REQUIRE(batched.size() == 64);
  double worst = 0.0;
  for (std::size_t b = 0; b < 64; ++b) {
    const auto one = m.score_batch(std::span(reqs).subspan(b, 1));
    REQUIRE(one.size() == 1);
    worst = std::max(worst, std::abs(one[0] - batched[b]));
    worst = std::max(worst, std::abs(snap.score(reqs[b].nodes) - batched[b]));
  }
  CHECK(worst < 1e-12);
  CHECK(m.score_batch({}).empty());
  std::vector<ScoreRequest> ragged{{{0, 1, 2}}, {{0, 1}}};
  CHECK_THROWS_AS(m.score_batch(ragged), ShapeError);
}

TEST_CASE("score_items agrees with score") {
  std::mt19937_64 gen(24);
  const auto inst = oracle::random_instance(gen, 4, 24, 12);
  const auto g = build_graph(inst.records, inst.schema);
  for (HeadKind head : {HeadKind::mf, HeadKind::fm, HeadKind::ncf}) {
    for (ProviderKind prov : {ProviderKind::table, ProviderKind::gce}) {
      ModelOptions o = options(head, 3);
      o.provider = prov;
      Rng rng(3);
      Model m(o, g, nullptr, rng);
      for (auto& b : m.node_bias().value.values()) b = oracle::random_dense(1, 1, gen)(0, 0);
      const auto snap = m.snapshot();
      std::vector<std::size_t> nodes;
      for (std::size_t f = 0; f < 4; ++f) nodes.push_back(g.indexer.global_id(f, 0));
      std::vector<std::uint32_t> items(g.indexer.cardinality(1));
      std::iota(items.begin(), items.end(), 0);
      std::vector<double> out(items.size());
      snap.score_items(nodes, items, out);
      for (std::uint32_t i : items) {
        auto n = nodes;
        n[1] = g.indexer.global_id(1, i);
        CHECK(std::abs(out[i] - snap.score(n)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("head gradients") {
  std::mt19937_64 gen(25);
  const auto inst = oracle::random_instance(gen, 3, 14, 8);
  const auto g = build_graph(inst.records, inst.schema);
  FieldBatch batch;
  batch.fields.resize(3);
  for (int b = 0; b < 6; ++b) {
    for (std::size_t f = 0; f < 3; ++f) {
      batch.fields[f].push_back(g.indexer.global_id(f, gen() % g.indexer.cardinality(f)));
    }
  }
  for (HeadKind head : {HeadKind::mf, HeadKind::fm, HeadKind::ncf}) {
    for (ProviderKind prov : {ProviderKind::table, ProviderKind::gce}) {
      ModelOptions o = options(head, 3);
      o.provider = prov;
      Rng rng(4);
      Model m(o, g, nullptr, rng);
      for (auto& p : m.mlp_parameters()) {
        for (double& v : p.value.values()) v += 0.1;
      }
      const auto weights = oracle::random_dense(6, 1, gen);
      const auto ps = m.parameters();
      const auto res = check_gradient([&](ad::Tape& t) {
        auto e = m.node_embeddings(t, {});
        return ad::sum(ad::hadamard(m.score(t, e, batch), t.constant(weights)));
      }, ps);
      INFO(to_string(head), " ", to_string(prov), " worst ", res.worst_parameter);
      CHECK(res.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("parameter layout") {
  const auto g = two_field_graph();
  Rng rng(5);
  Model mf(options(HeadKind::mf, 3), g, nullptr, rng);
  CHECK(mf.trainable_count() == 4 * 3);
  CHECK(mf.tag() == "mf/table");
  Model fm(options(HeadKind::fm, 3), g, nullptr, rng);
  CHECK(fm.trainable_count() == 4 * 3 + 1 + 4);
  Model ncf(options(HeadKind::ncf, 3, {5}), g, nullptr, rng);
  CHECK(ncf.trainable_count() == 4 * 3 + 1 + 4 + (6 * 5 + 5) + (5 + 1));
  CHECK(parse_head("ncf") == HeadKind::ncf);
  CHECK_THROWS_AS(parse_head("nfm"), ConfigError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  std::mt19937_64 gen(26);
  const auto inst = oracle::random_instance(gen, 3, 12, 8);
  const auto g = build_graph(inst.records, inst.schema);
  ModelOptions o = options(HeadKind::ncf, 4);
  o.provider = ProviderKind::gce;
  Rng r1(6), r2(7);
  Model a(o, g, nullptr, r1);
  Model b(o, g, nullptr, r2);
  std::stringstream buf;
  a.save(buf);
  const auto bytes = buf.str();
  b.load(buf);
  const auto pa = a.parameters(), pb = b.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value == pb[i]->value);
  std::stringstream again;
  b.save(again);
  CHECK(again.str() == bytes);

  Model other(options(HeadKind::fm, 4), g, nullptr, r1);
  std::istringstream in(bytes);
  CHECK_THROWS_AS(other.load(in), CheckpointError);
  ModelOptions wide = o;
  wide.embedding.dim = 5;
  Model c(wide, g, nullptr, r1);
  std::istringstream in2(bytes);
  CHECK_THROWS_AS(c.load(in2), CheckpointError);
}

}  // TEST_SUITE
