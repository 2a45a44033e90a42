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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gce/data/record.h"
#include "gce/graph/schema.h"

namespace gce {

// Raw external key <-> dense local id, ids assigned in first-seen order.
class IdMap {
 public:
  std::uint32_t intern(std::string_view key);
  std::optional<std::uint32_t> find(std::string_view key) const;
  const std::string& key(std::uint32_t id) const { return keys_.at(id); }
  const std::vector<std::string>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }

  friend bool operator==(const IdMap& a, const IdMap& b) { return a.keys_ == b.keys_; }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Column layout of a delimited interaction file.
struct TabularFormat {
  char delimiter = '\t';
  std::size_t user_column = 0;
  std::size_t item_column = 1;
  std::optional<std::size_t> rating_column;
  std::optional<std::size_t> timestamp_column;
  std::vector<std::size_t> context_columns;
  std::vector<std::string> context_names;
  bool has_header = false;

  // Native MovieLens-100k u.data: "user item rating timestamp", tab separated.
  static TabularFormat ml100k();
};

struct Dataset {
  FieldSchema schema;
  std::vector<InteractionRecord> records;
  std::vector<IdMap> ids;  // one per schema field
  bool has_timestamps = false;

  std::size_t user_count() const { return schema[FieldSchema::kUser].cardinality; }
  std::size_t item_count() const { return schema[FieldSchema::kItem].cardinality; }
};

// Every row becomes one positive interaction; ratings are parsed and dropped.
// Records are stably sorted by (user, timestamp) when timestamps exist.
// Throws ParseError with the 1-based line number on malformed rows.
Dataset load_tabular(std::istream& in, const TabularFormat& format,
                     const std::string& source = "<stream>");
Dataset load_tabular(const std::filesystem::path& path, const TabularFormat& format);

struct DeriveStats {
  std::size_t users_dropped = 0;    // fewer than two interactions
  std::size_t records_dropped = 0;  // each kept user's first interaction
};

// Adds one context field holding the previously interacted item of the same
// user. The first interaction of each user has no predecessor and is dropped.
Dataset derive_last_clicked_context(const Dataset& ds, DeriveStats* stats = nullptr);

struct FilterOptions {
  std::size_t min_interactions_per_user = 3;
  std::optional<std::size_t> top_items;
};

// Keeps the top_items most frequent items (ties to the lower id), then drops
// users below the minimum, then re-densifies user and item ids preserving
// their relative order. Context id spaces are left untouched. Throws
// DataError when nothing survives.
Dataset filter(const Dataset& ds, const FilterOptions& options);

}  // namespace gce
