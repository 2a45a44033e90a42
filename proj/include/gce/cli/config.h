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
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gce/data/dataset.h"
#include "gce/graph/graph.h"
#include "gce/models/model.h"
#include "gce/training/training.h"

namespace gce {

// Flat "key = value" file. '#' starts a comment; keys may contain dots.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

enum class ContextMode { last_item, columns, none };

struct RunConfig {
  // data
  std::filesystem::path data_path;
  TabularFormat tabular = TabularFormat::ml100k();
  ContextMode context = ContextMode::last_item;
  FilterOptions filter;
  std::filesystem::path side_info_path;
  std::string side_info_field = "item";
  char side_info_delimiter = '\t';
  GraphOptions graph;

  // model
  ModelOptions model;

  // training
  TrainConfig train;
  bool probe_full_epoch = false;

  // evaluation
  std::vector<std::size_t> eval_ks{10, 20};
  bool exclude_train_positives = false;
  std::vector<std::uint64_t> seeds{0};

  // grid search
  std::vector<double> grid_lr{0.0001, 0.0005, 0.001, 0.005, 0.01};
  std::vector<std::size_t> grid_batch{256, 512, 1024, 2048};
  std::vector<double> grid_dropout{0.0, 0.15, 0.5};
  std::uint64_t grid_seed = 0;

  std::filesystem::path output_dir = "out";
  std::filesystem::path cache_dir;  // defaults to <output_dir>/cache

  // Every key this run was built from, for the manifest.
  std::map<std::string, std::string> resolved;
};

// Validates every key and value. Unknown keys and bad values throw ConfigError.
RunConfig resolve(const KeyValueConfig& kv);
RunConfig load_run_config(const std::filesystem::path& path);

// Keys that affect ingestion, for cache fingerprints.
std::map<std::string, std::string> data_keys(const RunConfig& cfg);

}  // namespace gce
