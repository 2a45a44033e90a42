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

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gce/cli/config.h"
#include "gce/data/dataset.h"
#include "gce/data/side_info.h"
#include "gce/data/split.h"
#include "gce/embeddings/features.h"
#include "gce/graph/graph.h"
#include "gce/models/model.h"
#include "gce/training/training.h"

namespace gce {

inline constexpr std::uint8_t kCacheVersion = 1;

struct RawStats {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
};

// Ingested data after context derivation, filtering and splitting. The
// dataset keeps schema and id maps only; its records live in `split`.
struct Prepared {
  Dataset dataset;
  Split split;
  RawStats raw;
  DeriveStats derive;
  std::uint64_t fingerprint = 0;
};

// load -> derive context -> filter -> split.
Prepared prepare(const RunConfig& cfg);

// FNV-1a over the interaction file, the side-info file and the data.* keys.
std::uint64_t data_fingerprint(const RunConfig& cfg);

void write_cache(std::ostream& out, const Prepared& p);
// Throws DataError on bad magic, version mismatch or truncation.
Prepared read_cache(std::istream& in);
std::filesystem::path cache_path(const RunConfig& cfg);
// Reads the cache; throws DataError when it is missing or stale.
Prepared load_cache(const RunConfig& cfg);

std::string stats_json(const Prepared& p);

// Graph over the training split plus node features for the configured provider.
struct Experiment {
  Prepared data;
  NPartiteGraph graph;
  std::vector<SideInfoMatrix> side_info;
  NodeFeatureMatrix features;
};

Experiment make_experiment(const RunConfig& cfg, Prepared data);
std::unique_ptr<Model> make_model(const RunConfig& cfg, const Experiment& ex, std::uint64_t seed);

std::filesystem::path checkpoint_path(const RunConfig& cfg, std::uint64_t seed);

}  // namespace gce
