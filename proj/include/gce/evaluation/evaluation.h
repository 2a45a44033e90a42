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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gce/data/record.h"
#include "gce/graph/schema.h"
#include "gce/models/model.h"

namespace gce {

// One leave-one-out query: the held-out record's fixed fields plus its item.
struct RankTask {
  std::vector<std::size_t> nodes;        // global ids, item slot holds the truth
  std::uint32_t user = 0;
  std::uint32_t truth = 0;               // item-local id
  std::vector<std::uint32_t> candidates; // item-local ids; empty means the full catalog
};

std::vector<RankTask> make_tasks(std::span<const InteractionRecord> records,
                                 const NodeIndexer& indexer);

// Restricts each task's candidates to the catalog minus the user's training
// items. The truth always stays a candidate.
void exclude_train_positives(std::vector<RankTask>& tasks,
                             std::span<const InteractionRecord> train, std::size_t item_count);

// Top-k ids by descending score, ties by ascending id.
std::vector<std::uint32_t> top_k(std::span<const double> scores,
                                 std::span<const std::uint32_t> ids, std::size_t k);
// 1-based position `truth` would get in the full top_k ordering. O(n).
std::size_t truth_rank(std::span<const double> scores, std::span<const std::uint32_t> ids,
                       std::uint32_t truth);

std::vector<std::uint32_t> rank(const ScoringSnapshot& snapshot, const RankTask& task,
                                std::size_t k);

double hr_at_k(std::span<const std::uint32_t> ranked, std::uint32_t truth, std::size_t k);
double ndcg_at_k(std::span<const std::uint32_t> ranked, std::uint32_t truth, std::size_t k);
double hr_from_rank(std::size_t rank, std::size_t k);
double ndcg_from_rank(std::size_t rank, std::size_t k);

// Per-K means over tasks for one model.
struct SeedMetrics {
  std::vector<std::size_t> ks;
  std::vector<double> hr;
  std::vector<double> ndcg;
  std::size_t tasks = 0;

  double hr_at(std::size_t k) const;
  double ndcg_at(std::size_t k) const;
};

// Truth ranks of every task, in task order.
std::vector<std::size_t> task_ranks(const ScoringSnapshot& snapshot, std::span<const RankTask> tasks);
SeedMetrics metrics_from_ranks(std::span<const std::size_t> ranks, std::span<const std::size_t> ks);
// Throws EvalError for zero tasks.
SeedMetrics evaluate_snapshot(const ScoringSnapshot& snapshot, std::span<const RankTask> tasks,
                              std::span<const std::size_t> ks);

struct MetricSummary {
  std::string metric;  // "HR" or "NDCG"
  std::size_t k = 0;
  double mean = 0.0;
  double std = 0.0;  // sample deviation over seeds, 0 for one seed
  std::vector<double> seeds;
};

struct EvalReport {
  std::vector<MetricSummary> cells;
  std::size_t tasks = 0;

  const MetricSummary& get(const std::string& metric, std::size_t k) const;
  std::string to_json() const;
  // One row per model tag: tag,HR@K,NDCG@K,... with "mean±std" cells.
  std::string to_csv(const std::string& tag) const;
};

EvalReport aggregate(std::span<const SeedMetrics> per_seed);

enum class LongTailMode { items, users };
LongTailMode parse_long_tail_mode(const std::string& s);

struct LongTailFilter {
  LongTailMode mode = LongTailMode::items;
  std::size_t k = 0;
};

// Ids of the k most frequent items (or most active users) in `train`, ties to the lower id.
std::vector<std::uint32_t> most_popular(std::span<const InteractionRecord> train, LongTailMode mode,
                                        std::size_t k);
// Drops tasks whose truth item (or user) is among the k most popular. Throws
// EvalError when nothing survives.
std::vector<RankTask> apply_long_tail(std::span<const RankTask> tasks,
                                      std::span<const InteractionRecord> train,
                                      const LongTailFilter& filter);

}  // namespace gce
