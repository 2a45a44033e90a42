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

#include "gce/evaluation/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gce/error.h"

namespace gce {

std::vector<RankTask> make_tasks(std::span<const InteractionRecord> records,
                                 const NodeIndexer& indexer) {
  std::vector<RankTask> tasks;
  tasks.reserve(records.size());
  for (const auto& r : records) {
    RankTask t;
    t.user = r.user;
    t.truth = r.item;
    t.nodes.resize(r.field_count());
    for (std::size_t f = 0; f < r.field_count(); ++f) t.nodes[f] = indexer.global_id(f, r.field_id(f));
    tasks.push_back(std::move(t));
  }
  return tasks;
}

void exclude_train_positives(std::vector<RankTask>& tasks,
                             std::span<const InteractionRecord> train, std::size_t item_count) {
  std::vector<std::set<std::uint32_t>> seen;
  for (const auto& r : train) {
    if (r.user >= seen.size()) seen.resize(r.user + 1);
    seen[r.user].insert(r.item);
  }
  for (auto& t : tasks) {
    t.candidates.clear();
    for (std::uint32_t i = 0; i < item_count; ++i) {
      if (i == t.truth || t.user >= seen.size() || !seen[t.user].count(i)) t.candidates.push_back(i);
    }
  }
}

namespace {

bool ranks_before(double sa, std::uint32_t a, double sb, std::uint32_t b) {
  return sa > sb || (sa == sb && a < b);
}

std::vector<std::uint32_t> full_catalog(std::size_t n) {
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  return ids;
}

}  // namespace

std::vector<std::uint32_t> top_k(std::span<const double> scores,
                                 std::span<const std::uint32_t> ids, std::size_t k) {
  if (scores.size() != ids.size()) throw ShapeError("top_k: scores and ids differ in length");
  if (ids.empty()) throw EvalError("rank: empty candidate set");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t m = std::min(k, order.size());
  auto cmp = [&](std::size_t a, std::size_t b) {
    return ranks_before(scores[a], ids[a], scores[b], ids[b]);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(), cmp);
  std::vector<std::uint32_t> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = ids[order[i]];
  return out;
}

std::size_t truth_rank(std::span<const double> scores, std::span<const std::uint32_t> ids,
                       std::uint32_t truth) {
  if (scores.size() != ids.size()) throw ShapeError("truth_rank: scores and ids differ in length");
  auto it = std::find(ids.begin(), ids.end(), truth);
  if (it == ids.end()) throw EvalError("truth item " + std::to_string(truth) + " not among candidates");
  const double st = scores[static_cast<std::size_t>(it - ids.begin())];
  if (!std::isfinite(st)) throw NumericError("non-finite score for truth item");
  std::size_t r = 1;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ranks_before(scores[i], ids[i], st, truth)) ++r;
  }
  return r;
}

std::vector<std::uint32_t> rank(const ScoringSnapshot& snapshot, const RankTask& task,
                                std::size_t k) {
  const auto ids = task.candidates.empty()
                     ? full_catalog(snapshot.indexer.cardinality(FieldSchema::kItem))
                     : task.candidates;
  std::vector<double> scores(ids.size());
  snapshot.score_items(task.nodes, ids, scores);
  return top_k(scores, ids, k);
}

double hr_at_k(std::span<const std::uint32_t> ranked, std::uint32_t truth, std::size_t k) {
  const std::size_t m = std::min(k, ranked.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (ranked[i] == truth) return 1.0;
  }
  return 0.0;
}

double ndcg_at_k(std::span<const std::uint32_t> ranked, std::uint32_t truth, std::size_t k) {
  const std::size_t m = std::min(k, ranked.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (ranked[i] == truth) return ndcg_from_rank(i + 1, k);
  }
  return 0.0;
}

double hr_from_rank(std::size_t rank, std::size_t k) { return rank <= k ? 1.0 : 0.0; }

double ndcg_from_rank(std::size_t rank, std::size_t k) {
  return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
}

double SeedMetrics::hr_at(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return hr[i];
  }
  throw EvalError("HR@" + std::to_string(k) + " was not computed");
}

double SeedMetrics::ndcg_at(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return ndcg[i];
  }
  throw EvalError("NDCG@" + std::to_string(k) + " was not computed");
}

std::vector<std::size_t> task_ranks(const ScoringSnapshot& snapshot,
                                    std::span<const RankTask> tasks) {
  const auto catalog = full_catalog(snapshot.indexer.cardinality(FieldSchema::kItem));
  std::vector<double> scores;
  std::vector<std::size_t> ranks;
  ranks.reserve(tasks.size());
  for (const auto& t : tasks) {
    const auto& ids = t.candidates.empty() ? catalog : t.candidates;
    scores.resize(ids.size());
    snapshot.score_items(t.nodes, ids, scores);
    ranks.push_back(truth_rank(scores, ids, t.truth));
  }
  return ranks;
}

SeedMetrics metrics_from_ranks(std::span<const std::size_t> ranks, std::span<const std::size_t> ks) {
  if (ranks.empty()) throw EvalError("evaluation over zero tasks");
  SeedMetrics m;
  m.ks.assign(ks.begin(), ks.end());
  m.tasks = ranks.size();
  for (std::size_t k : ks) {
    if (k == 0) throw EvalError("K must be at least 1");
    double hr = 0.0;
    double ndcg = 0.0;
    for (std::size_t r : ranks) {
      hr += hr_from_rank(r, k);
      ndcg += ndcg_from_rank(r, k);
    }
    m.hr.push_back(hr / static_cast<double>(ranks.size()));
    m.ndcg.push_back(ndcg / static_cast<double>(ranks.size()));
  }
  return m;
}

SeedMetrics evaluate_snapshot(const ScoringSnapshot& snapshot, std::span<const RankTask> tasks,
                              std::span<const std::size_t> ks) {
  if (tasks.empty()) throw EvalError("evaluation over zero tasks");
  const auto ranks = task_ranks(snapshot, tasks);
  return metrics_from_ranks(ranks, ks);
}

const MetricSummary& EvalReport::get(const std::string& metric, std::size_t k) const {
  for (const auto& c : cells) {
    if (c.metric == metric && c.k == k) return c;
  }
  throw EvalError("report has no " + metric + "@" + std::to_string(k));
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    arr.push_back({{"metric", c.metric},
                   {"K", c.k},
                   {"mean", c.mean},
                   {"std", c.std},
                   {"seeds", c.seeds},
                   {"tasks", tasks}});
  }
  return arr.dump(2);
}

std::string EvalReport::to_csv(const std::string& tag) const {
  std::ostringstream head;
  std::ostringstream row;
  head << "model";
  row << tag;
  for (const auto& c : cells) {
    head << ',' << c.metric << '@' << c.k;
    row << ',' << c.mean << "±" << c.std;
  }
  return head.str() + "\n" + row.str() + "\n";
}

EvalReport aggregate(std::span<const SeedMetrics> per_seed) {
  if (per_seed.empty()) throw EvalError("no seeds to aggregate");
  EvalReport rep;
  rep.tasks = per_seed.front().tasks;
  const auto& ks = per_seed.front().ks;
  for (const char* metric : {"HR", "NDCG"}) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      MetricSummary c;
      c.metric = metric;
      c.k = ks[i];
      for (const auto& s : per_seed) {
        if (s.ks != ks) throw EvalError("seeds were evaluated at different K");
        c.seeds.push_back(c.metric == "HR" ? s.hr[i] : s.ndcg[i]);
      }
      const double n = static_cast<double>(c.seeds.size());
      c.mean = std::accumulate(c.seeds.begin(), c.seeds.end(), 0.0) / n;
      if (c.seeds.size() > 1) {
        double ss = 0.0;
        for (double v : c.seeds) ss += (v - c.mean) * (v - c.mean);
        c.std = std::sqrt(ss / (n - 1.0));
      }
      rep.cells.push_back(std::move(c));
    }
  }
  return rep;
}

LongTailMode parse_long_tail_mode(const std::string& s) {
  if (s == "items") return LongTailMode::items;
  if (s == "users") return LongTailMode::users;
  throw ConfigError("unknown long-tail mode '" + s + "' (expected items|users)");
}

std::vector<std::uint32_t> most_popular(std::span<const InteractionRecord> train, LongTailMode mode,
                                        std::size_t k) {
  std::vector<std::size_t> counts;
  for (const auto& r : train) {
    const std::uint32_t id = mode == LongTailMode::items ? r.item : r.user;
    if (id >= counts.size()) counts.resize(id + 1, 0);
    ++counts[id];
  }
  std::vector<std::uint32_t> ids(counts.size());
  std::iota(ids.begin(), ids.end(), 0u);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return counts[a] > counts[b]; });
  ids.resize(std::min(k, ids.size()));
  return ids;
}

std::vector<RankTask> apply_long_tail(std::span<const RankTask> tasks,
                                      std::span<const InteractionRecord> train,
                                      const LongTailFilter& filter) {
  const auto popular = most_popular(train, filter.mode, filter.k);
  const std::set<std::uint32_t> drop(popular.begin(), popular.end());
  std::vector<RankTask> kept;
  for (const auto& t : tasks) {
    const std::uint32_t id = filter.mode == LongTailMode::items ? t.truth : t.user;
    if (!drop.count(id)) kept.push_back(t);
  }
  if (kept.empty()) throw EvalError("long-tail filter removed every task");
  return kept;
}

}  // namespace gce
