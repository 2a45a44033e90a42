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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "gce/error.h"
#include "gce/evaluation/evaluation.h"
#include "json.hpp"
#include "support/checks.h"
#include "support/oracles.h"

using namespace gce;

namespace {

std::vector<std::uint32_t> iota_ids(std::size_t n) {
  std::vector<std::uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i);
  return ids;
}

InteractionRecord rec(std::uint32_t u, std::uint32_t i) { return {u, i, {}, {}}; }

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("ranking by hand") {
  const std::vector<double> s{0.1, 0.9, 0.5};
  CHECK(top_k(s, iota_ids(3), 3) == std::vector<std::uint32_t>{1, 2, 0});
  CHECK(top_k(s, iota_ids(3), 10) == std::vector<std::uint32_t>{1, 2, 0});
  const std::vector<double> flat(6, 2.0);
  CHECK(top_k(flat, iota_ids(6), 4) == std::vector<std::uint32_t>{0, 1, 2, 3});
  CHECK(truth_rank(flat, iota_ids(6), 5) == 6);
  CHECK(truth_rank(s, iota_ids(3), 0) == 3);
  const std::vector<double> none;
  CHECK_THROWS_AS(top_k(none, iota_ids(0), 3), EvalError);
}

TEST_CASE("metrics by hand") {
  const std::vector<std::uint32_t> ranked{4, 7, 9, 1};
  CHECK(hr_at_k(ranked, 4, 10) == 1.0);
  CHECK(ndcg_at_k(ranked, 4, 10) == 1.0);
  CHECK(ndcg_at_k(ranked, 9, 10) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hr_at_k(ranked, 9, 2) == 0.0);
  CHECK(hr_at_k(ranked, 3, 10) == 0.0);
  CHECK(hr_from_rank(11, 10) == 0.0);
  CHECK(ndcg_from_rank(11, 10) == 0.0);
  CHECK(ndcg_from_rank(3, 10) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hr_from_rank(10, 10) == 1.0);
}

TEST_CASE("means over tasks") {
  const std::vector<std::size_t> ks{10};
  const std::vector<std::size_t> one{1};
  const auto a = metrics_from_ranks(one, ks);
  CHECK(a.hr_at(10) == 1.0);
  CHECK(a.ndcg_at(10) == 1.0);
  const std::vector<std::size_t> two{1, 50};
  CHECK(metrics_from_ranks(two, ks).ndcg_at(10) == 0.5);
}

TEST_CASE("against the sorting oracle") {
  const auto out = check::metric_oracles(41, 1000);
  INFO(out.detail);
  CHECK(out.ok);
  CHECK(out.cases >= 1000);
}

TEST_CASE("monotone in K and NDCG below HR") {
  std::mt19937_64 gen(42);
  std::vector<std::size_t> ranks;
  for (int k = 0; k < 500; ++k) ranks.push_back(1 + gen() % 60);
  const std::vector<std::size_t> ks{1, 5, 10, 20, 50};
  const auto m = metrics_from_ranks(ranks, ks);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    CHECK(m.ndcg[i] <= m.hr[i]);
    if (i > 0) {
      CHECK(m.hr[i] >= m.hr[i - 1]);
      CHECK(m.ndcg[i] >= m.ndcg[i - 1]);
    }
  }
  for (std::size_t r = 1; r < 30; ++r) CHECK(ndcg_from_rank(r, 10) <= hr_from_rank(r, 10));
}

TEST_CASE("task order does not matter") {
  std::mt19937_64 gen(43);
  std::vector<std::size_t> ranks;
  for (int k = 0; k < 200; ++k) ranks.push_back(1 + gen() % 30);
  const std::vector<std::size_t> ks{10, 20};
  const auto a = metrics_from_ranks(ranks, ks);
  std::sort(ranks.begin(), ranks.end());
  const auto b = metrics_from_ranks(ranks, ks);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(a.hr[i] - b.hr[i]) <= 1e-12);
    CHECK(std::abs(a.ndcg[i] - b.ndcg[i]) <= 1e-12);
  }
}

TEST_CASE("aggregate over seeds") {
  SeedMetrics s1{{10}, {0.2}, {0.1}, 5}, s2{{10}, {0.4}, {0.3}, 5};
  const std::vector<SeedMetrics> seeds{s1, s2};
  const auto rep = aggregate(seeds);
  CHECK(rep.get("HR", 10).mean == doctest::Approx(0.3));
  CHECK(rep.get("HR", 10).std == doctest::Approx(std::sqrt(0.02)));
  CHECK(rep.get("NDCG", 10).seeds == std::vector<double>{0.1, 0.3});
  CHECK(rep.tasks == 5);
  const auto json = nlohmann::json::parse(rep.to_json());
  REQUIRE(json.size() == 2);
  CHECK(json[0]["metric"] == "HR");
  CHECK(json[0]["K"] == 10);
  CHECK(json[0]["tasks"] == 5);
  CHECK(rep.to_csv("fm/gce").find("\nfm/gce,") != std::string::npos);
  const std::vector<SeedMetrics> single{s1};
  CHECK(aggregate(single).get("HR", 10).std == 0.0);
}

TEST_CASE("evaluating nothing is an error") {
  const FieldSchema schema({{"user", 1}, {"item", 2}});
  Rng rng(1);
  const std::vector<InteractionRecord> rs{rec(0, 0)};
  const auto g = build_graph(rs, schema);
  ModelOptions o;
  o.embedding.dim = 2;
  Model m(o, g, nullptr, rng);
  const std::vector<std::size_t> ks{10};
  CHECK_THROWS_AS(evaluate_snapshot(m.snapshot(), std::vector<RankTask>{}, ks), EvalError);
}

TEST_CASE("excluding training positives keeps the truth") {
  const std::vector<InteractionRecord> train{rec(0, 1), rec(0, 2), rec(1, 0)};
  const FieldSchema schema({{"user", 2}, {"item", 4}});
  const NodeIndexer ix(schema);
  const std::vector<InteractionRecord> test{rec(0, 2), rec(1, 3)};
  auto tasks = make_tasks(test, ix);
  exclude_train_positives(tasks, train, 4);
  CHECK(tasks[0].candidates == std::vector<std::uint32_t>{0, 2, 3});
  CHECK(tasks[1].candidates == std::vector<std::uint32_t>{1, 2, 3});
}

TEST_CASE("long tail filter") {
  // item 0 is the most popular
  const std::vector<InteractionRecord> train{rec(0, 0), rec(1, 0), rec(2, 0), rec(0, 1), rec(1, 2)};
  const NodeIndexer ix(FieldSchema({{"user", 3}, {"item", 3}}));
  const std::vector<InteractionRecord> test{rec(0, 0), rec(1, 1)};
  const auto tasks = make_tasks(test, ix);
  CHECK(most_popular(train, LongTailMode::items, 1) == std::vector<std::uint32_t>{0});
  // ties go to the lower id
  CHECK(most_popular(train, LongTailMode::items, 2) == std::vector<std::uint32_t>{0, 1});
  CHECK(most_popular(train, LongTailMode::users, 2) == std::vector<std::uint32_t>{0, 1});
  const auto kept = apply_long_tail(tasks, train, {LongTailMode::items, 1});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].truth == 1);
  const auto all = apply_long_tail(tasks, train, {LongTailMode::items, 0});
  REQUIRE(all.size() == tasks.size());
  for (std::size_t t = 0; t < all.size(); ++t) {
    CHECK(all[t].nodes == tasks[t].nodes);
    CHECK(all[t].truth == tasks[t].truth);
  }
  CHECK_THROWS_AS(apply_long_tail(tasks, train, {LongTailMode::items, 3}), EvalError);
  CHECK(parse_long_tail_mode("users") == LongTailMode::users);
  CHECK_THROWS_AS(parse_long_tail_mode("movies"), ConfigError);
}

TEST_CASE("long tail k=0 gives bitwise identical metrics") {
  std::mt19937_64 gen(44);
  const auto inst = oracle::random_instance(gen, 3, 30, 25);
  const auto g = build_graph(inst.records, inst.schema);
  ModelOptions o;
  o.head = HeadKind::ncf;
  o.embedding.dim = 3;
  o.ncf_hidden = {4};
  Rng rng(2);
  Model m(o, g, nullptr, rng);
  const auto snap = m.snapshot();
  const auto tasks = make_tasks(inst.records, m.indexer());
  const std::vector<std::size_t> ks{10, 20};
  const auto a = evaluate_snapshot(snap, tasks, ks);
  const auto b = evaluate_snapshot(snap, apply_long_tail(tasks, inst.records, {}), ks);
  CHECK(a.hr == b.hr);
  CHECK(a.ndcg == b.ndcg);
}

}  // TEST_SUITE
