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
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gce/data/record.h"
#include "gce/evaluation/evaluation.h"
#include "gce/models/model.h"
#include "gce/numerics/adam.h"
#include "gce/random.h"

namespace gce {

// Which training positives a sampled negative must avoid.
enum class NegativeKey { user_context, user };
std::string to_string(NegativeKey k);
NegativeKey parse_negative_key(const std::string& s);

// Embedding size and dropout live in ModelOptions; these drive the loop.
struct TrainConfig {
  double lr = 0.001;
  std::size_t batch_size = 1024;
  std::size_t max_epochs = 150;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  std::size_t negatives = 1;
  NegativeKey negative_key = NegativeKey::user_context;
  bool log_elapsed = false;
};

class PositiveIndex {
 public:
  PositiveIndex(std::span<const InteractionRecord> train, std::size_t item_count, NegativeKey key);

  std::vector<std::uint32_t> key_of(const InteractionRecord& r) const;
  // Sorted positives for a key; empty when unseen.
  std::span<const std::uint32_t> positives(const std::vector<std::uint32_t>& key) const;
  bool contains(const std::vector<std::uint32_t>& key, std::uint32_t item) const;
  std::size_t item_count() const { return item_count_; }
  NegativeKey key_mode() const { return mode_; }

 private:
  std::map<std::vector<std::uint32_t>, std::vector<std::uint32_t>> sets_;
  std::size_t item_count_;
  NegativeKey mode_;
};

inline constexpr std::size_t kRejectionDraws = 100;

// Uniform over items outside the key's positives. Throws SamplingError when
// there are none.
std::uint32_t sample_negative(const PositiveIndex& index, const std::vector<std::uint32_t>& key,
                              Rng& rng);

// Mean of softplus(neg - pos).
double bpr_loss(std::span<const double> pos, std::span<const double> neg);
ad::Var bpr_loss(ad::Var pos, ad::Var neg);

class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true when `value` strictly improves on the best so far.
  bool update(std::size_t epoch, double value);
  bool should_stop(std::size_t epoch) const { return epoch >= best_epoch_ + patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double val_hr10 = 0.0;
  double val_ndcg10 = 0.0;
  std::optional<double> elapsed_s;

  std::string to_json() const;
};

struct TrainReport {
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;
  double best_val_ndcg10 = 0.0;
  std::string stop_reason;  // "patience" or "max_epochs"
};

// Builds the field-major batches for positives records[order[begin, end)] and
// their sampled negatives, `negatives` per positive.
struct BprBatch {
  FieldBatch positive;
  FieldBatch negative;
};
BprBatch make_bpr_batch(std::span<const InteractionRecord> records,
                        std::span<const std::size_t> order, const NodeIndexer& indexer,
                        const PositiveIndex& index, std::size_t negatives, Rng& rng);

// One forward/backward pass of the BPR objective; leaves gradients in the
// model's parameters (zeroed first) and returns the loss.
double bpr_step_gradients(Model& model, const BprBatch& batch, Rng* dropout_rng);

// Seeded Fisher-Yates order over n records.
std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng);

// Trains on `train`, validating NDCG@10 on `validation` after every epoch,
// and restores the best epoch's parameters. Log lines go to `log` if given.
TrainReport train(Model& model, std::span<const InteractionRecord> train,
                  std::span<const InteractionRecord> validation, const TrainConfig& config,
                  std::ostream* log = nullptr);

// One optimizer step on one shuffled mini-batch (or one full epoch), then
// evaluation on `test`.
SeedMetrics first_step_probe(Model& model, std::span<const InteractionRecord> train,
                             std::span<const InteractionRecord> test, const TrainConfig& config,
                             bool full_epoch = false);

}  // namespace gce
