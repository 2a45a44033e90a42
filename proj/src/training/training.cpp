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

#include "gce/training/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "gce/error.h"

namespace gce {

std::string to_string(NegativeKey k) {
  return k == NegativeKey::user_context ? "user_context" : "user";
}

NegativeKey parse_negative_key(const std::string& s) {
  if (s == "user_context") return NegativeKey::user_context;
  if (s == "user") return NegativeKey::user;
  throw ConfigError("unknown negative key '" + s + "' (expected user_context|user)");
}

PositiveIndex::PositiveIndex(std::span<const InteractionRecord> train, std::size_t item_count,
                             NegativeKey key)
  : item_count_(item_count), mode_(key) {
  for (const auto& r : train) sets_[key_of(r)].push_back(r.item);
  for (auto& [k, items] : sets_) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
}

std::vector<std::uint32_t> PositiveIndex::key_of(const InteractionRecord& r) const {
  std::vector<std::uint32_t> key{r.user};
  if (mode_ == NegativeKey::user_context) key.insert(key.end(), r.contexts.begin(), r.contexts.end());
  return key;
}

std::span<const std::uint32_t> PositiveIndex::positives(const std::vector<std::uint32_t>& key) const {
  auto it = sets_.find(key);
  if (it == sets_.end()) return {};
  return it->second;
}

bool PositiveIndex::contains(const std::vector<std::uint32_t>& key, std::uint32_t item) const {
  const auto pos = positives(key);
  return std::binary_search(pos.begin(), pos.end(), item);
}

std::uint32_t sample_negative(const PositiveIndex& index, const std::vector<std::uint32_t>& key,
                              Rng& rng) {
  const std::size_t n = index.item_count();
  const auto pos = index.positives(key);
  if (n == 0 || pos.size() >= n) {
    throw SamplingError("no negative item available for user " + std::to_string(key.front()));
  }
  for (std::size_t draw = 0; draw < kRejectionDraws; ++draw) {
    const auto j = static_cast<std::uint32_t>(rng.below(n));
    if (!std::binary_search(pos.begin(), pos.end(), j)) return j;
  }
  // The j-th non-positive item, walking the sorted positives.
  std::uint64_t target = rng.below(n - pos.size());
  std::uint32_t j = 0;
  for (std::uint32_t p : pos) {
    if (p - j > target) break;
    target -= p - j;
    j = p + 1;
  }
  return static_cast<std::uint32_t>(j + target);
}

double bpr_loss(std::span<const double> pos, std::span<const double> neg) {
  if (pos.size() != neg.size()) throw ShapeError("bpr_loss: score vectors differ in length");
  if (pos.empty()) throw ShapeError("bpr_loss: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (!std::isfinite(pos[i]) || !std::isfinite(neg[i])) throw NumericError("bpr_loss: non-finite score");
    total += softplus(neg[i] - pos[i]);
  }
  return total / static_cast<double>(pos.size());
}

ad::Var bpr_loss(ad::Var pos, ad::Var neg) { return ad::mean(ad::softplus(ad::sub(neg, pos))); }

bool EarlyStopping::update(std::size_t epoch, double value) {
  if (value > best_) {
    best_ = value;
    best_epoch_ = epoch;
    return true;
  }
  return false;
}

std::string EpochLog::to_json() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["loss"] = loss;
  j["val_hr10"] = val_hr10;
  j["val_ndcg10"] = val_ndcg10;
  j["elapsed_s"] = elapsed_s ? nlohmann::ordered_json(*elapsed_s) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return order;
}

BprBatch make_bpr_batch(std::span<const InteractionRecord> records,
                        std::span<const std::size_t> order, const NodeIndexer& indexer,
                        const PositiveIndex& index, std::size_t negatives, Rng& rng) {
  const std::size_t fields = indexer.field_count();
  BprBatch b;
  b.positive.fields.assign(fields, {});
  b.negative.fields.assign(fields, {});
  const std::size_t item_offset = indexer.offset(FieldSchema::kItem);
  for (std::size_t idx : order) {
    const InteractionRecord& r = records[idx];
    if (r.field_count() != fields) throw ShapeError("training record has wrong field count");
    const auto key = index.key_of(r);
    for (std::size_t n = 0; n < negatives; ++n) {
      const std::uint32_t j = sample_negative(index, key, rng);
      for (std::size_t f = 0; f < fields; ++f) {
        const std::size_t g = indexer.global_id(f, r.field_id(f));
        b.positive.fields[f].push_back(g);
        b.negative.fields[f].push_back(f == FieldSchema::kItem ? item_offset + j : g);
      }
    }
  }
  return b;
}

double bpr_step_gradients(Model& model, const BprBatch& batch, Rng* dropout_rng) {
  for (Parameter* p : model.parameters()) p->zero_grad();
  ad::Tape tape;
  const ForwardContext ctx{dropout_rng != nullptr, dropout_rng};
  ad::Var g = model.node_embeddings(tape, ctx);
  ad::Var pos = model.score(tape, g, batch.positive);
  ad::Var neg = model.score(tape, g, batch.negative);
  ad::Var loss = bpr_loss(pos, neg);
  const double value = loss.value()(0, 0);
  if (!std::isfinite(value)) throw NumericError("training loss became non-finite");
  tape.backward(loss);
  return value;
}

namespace {

void validate(const TrainConfig& c) {
  if (c.batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (c.negatives == 0) throw ConfigError("train.negatives must be positive");
  if (!(c.lr > 0.0) || !std::isfinite(c.lr)) throw ConfigError("train.lr must be positive");
  if (c.max_epochs == 0) throw ConfigError("train.max_epochs must be positive");
}

struct Streams {
  Rng shuffle;
  Rng negatives;
  Rng dropout;
  explicit Streams(std::uint64_t seed)
    : shuffle(Rng(seed).substream("shuffle")),
      negatives(Rng(seed).substream("negatives")),
      dropout(Rng(seed).substream("dropout")) {}
};

}  // namespace

TrainReport train(Model& model, std::span<const InteractionRecord> train_records,
                  std::span<const InteractionRecord> validation, const TrainConfig& config,
                  std::ostream* log) {
  validate(config);
  if (train_records.empty()) throw DataError("training split is empty");
  const NodeIndexer& indexer = model.indexer();
  const PositiveIndex index(train_records, indexer.cardinality(FieldSchema::kItem),
                            config.negative_key);
  const auto val_tasks = make_tasks(validation, indexer);
  const std::vector<std::size_t> ks{10};

  Streams rng(config.seed);
  auto params = model.parameters();
  Adam adam(params, AdamOptions{config.lr});
  EarlyStopping stopper(config.patience);
  std::vector<DenseMatrix> best;
  TrainReport report;
  report.stop_reason = "max_epochs";
  const auto t0 = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto order = shuffled_order(train_records.size(), rng.shuffle);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const auto batch = make_bpr_batch(train_records, std::span(order).subspan(begin, end - begin),
                                        indexer, index, config.negatives, rng.negatives);
      loss_sum += bpr_step_gradients(model, batch, &rng.dropout) * static_cast<double>(end - begin);
      adam.step();
    }

    EpochLog line;
    line.epoch = epoch;
    line.loss = loss_sum / static_cast<double>(order.size());
    if (!val_tasks.empty()) {
      const auto m = evaluate_snapshot(model.snapshot(), val_tasks, ks);
      line.val_hr10 = m.hr[0];
      line.val_ndcg10 = m.ndcg[0];
    }
    if (config.log_elapsed) {
      line.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    if (log) *log << line.to_json() << '\n' << std::flush;
    spdlog::debug("epoch {} loss {:.6f} val ndcg@10 {:.4f}", epoch, line.loss, line.val_ndcg10);
    report.epochs.push_back(line);

    if (stopper.update(epoch, line.val_ndcg10)) {
      best.clear();
      for (const Parameter* p : params) best.push_back(p->value);
    }
    if (stopper.should_stop(epoch)) {
      report.stop_reason = "patience";
      break;
    }
  }

  if (best.empty()) throw NumericError("validation metric was never finite");
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  report.best_epoch = stopper.best_epoch();
  report.best_val_ndcg10 = stopper.best();
  spdlog::info("{}: best epoch {} of {} (val ndcg@10 {:.4f}, stop: {})", model.tag(),
               report.best_epoch, report.epochs.size(), report.best_val_ndcg10, report.stop_reason);
  return report;
}

SeedMetrics first_step_probe(Model& model, std::span<const InteractionRecord> train_records,
                             std::span<const InteractionRecord> test, const TrainConfig& config,
                             bool full_epoch) {
  validate(config);
  if (train_records.empty()) throw DataError("training split is empty");
  const NodeIndexer& indexer = model.indexer();
  const PositiveIndex index(train_records, indexer.cardinality(FieldSchema::kItem),
                            config.negative_key);
  Streams rng(config.seed);
  Adam adam(model.parameters(), AdamOptions{config.lr});
  const auto order = shuffled_order(train_records.size(), rng.shuffle);
  const std::size_t stop = full_epoch ? order.size() : std::min(order.size(), config.batch_size);
  for (std::size_t begin = 0; begin < stop; begin += config.batch_size) {
    const std::size_t end = std::min(stop, begin + config.batch_size);
    const auto batch = make_bpr_batch(train_records, std::span(order).subspan(begin, end - begin),
                                      indexer, index, config.negatives, rng.negatives);
    bpr_step_gradients(model, batch, &rng.dropout);
    adam.step();
  }
  const std::vector<std::size_t> ks{10, 20};
  return evaluate_snapshot(model.snapshot(), make_tasks(test, indexer), ks);
}

}  // namespace gce
