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

#include "gce/data/dataset.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>

#include <spdlog/spdlog.h>

#include "gce/error.h"

namespace gce {

std::uint32_t IdMap::intern(std::string_view key) {
  auto it = index_.find(std::string(key));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(keys_.size());
  keys_.emplace_back(key);
  index_.emplace(keys_.back(), id);
  return id;
}

std::optional<std::uint32_t> IdMap::find(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TabularFormat TabularFormat::ml100k() {
  TabularFormat f;
  f.delimiter = '\t';
  f.user_column = 0;
  f.item_column = 1;
  f.rating_column = 2;
  f.timestamp_column = 3;
  return f;
}

namespace {

std::vector<std::string_view> split_line(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ')) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

void sort_by_user_time(Dataset& ds) {
  if (ds.has_timestamps) {
    std::stable_sort(ds.records.begin(), ds.records.end(),
                     [](const InteractionRecord& a, const InteractionRecord& b) {
                       if (a.user != b.user) return a.user < b.user;
                       return *a.timestamp < *b.timestamp;
                     });
  }
}

}  // namespace

Dataset load_tabular(std::istream& in, const TabularFormat& format, const std::string& source) {
  std::vector<Field> fields{{"user", 0}, {"item", 0}};
  for (std::size_t c = 0; c < format.context_columns.size(); ++c) {
    fields.push_back({c < format.context_names.size() ? format.context_names[c]
                                                      : "context_" + std::to_string(c + 1),
                      0});
  }
  Dataset ds;
  ds.ids.resize(fields.size());
  ds.has_timestamps = format.timestamp_column.has_value();

  std::size_t needed = std::max(format.user_column, format.item_column);
  if (format.rating_column) needed = std::max(needed, *format.rating_column);
  if (format.timestamp_column) needed = std::max(needed, *format.timestamp_column);
  for (std::size_t c : format.context_columns) needed = std::max(needed, c);
  needed += 1;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && format.has_header) continue;
    if (line.empty()) continue;
    const auto cols = split_line(line, format.delimiter);
    if (cols.size() < needed) {
      throw ParseError(source, lineno, "expected at least " + std::to_string(needed) +
                                         " columns, found " + std::to_string(cols.size()));
    }
    InteractionRecord rec;
    auto key = [&](std::size_t col, const char* what) {
      std::string_view k = cols[col];
      if (k.empty()) throw ParseError(source, lineno, std::string("empty ") + what + " key");
      return k;
    };
    rec.user = ds.ids[0].intern(key(format.user_column, "user"));
    rec.item = ds.ids[1].intern(key(format.item_column, "item"));
    for (std::size_t c = 0; c < format.context_columns.size(); ++c) {
      rec.contexts.push_back(ds.ids[2 + c].intern(key(format.context_columns[c], "context")));
    }
    if (format.rating_column) {
      double rating = 0.0;
      if (!parse_number(cols[*format.rating_column], rating)) {
        throw ParseError(source, lineno, "bad rating '" +
                                           std::string(cols[*format.rating_column]) + "'");
      }
    }
    if (format.timestamp_column) {
      std::int64_t ts = 0;
      if (!parse_number(cols[*format.timestamp_column], ts)) {
        throw ParseError(source, lineno, "bad timestamp '" +
                                           std::string(cols[*format.timestamp_column]) + "'");
      }
      rec.timestamp = ts;
    }
    ds.records.push_back(std::move(rec));
  }
  for (std::size_t f = 0; f < fields.size(); ++f) fields[f].cardinality = ds.ids[f].size();
  ds.schema = FieldSchema(std::move(fields));
  sort_by_user_time(ds);
  return ds;
}

Dataset load_tabular(const std::filesystem::path& path, const TabularFormat& format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open interaction file '" + path.string() + "'");
  return load_tabular(in, format, path.string());
}

Dataset derive_last_clicked_context(const Dataset& ds, DeriveStats* stats) {
  if (!ds.has_timestamps) throw DataError("last-clicked context needs timestamps");
  std::vector<std::size_t> order(ds.records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = ds.records[a];
    const auto& rb = ds.records[b];
    if (ra.user != rb.user) return ra.user < rb.user;
    return *ra.timestamp < *rb.timestamp;
  });

  Dataset out;
  std::vector<Field> fields = ds.schema.fields();
  fields.push_back({"last_item", ds.item_count()});
  out.schema = FieldSchema(std::move(fields));
  out.ids = ds.ids;
  out.ids.push_back(ds.ids[FieldSchema::kItem]);
  out.has_timestamps = true;

  DeriveStats local;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    const std::uint32_t user = ds.records[order[i]].user;
    while (j < order.size() && ds.records[order[j]].user == user) ++j;
    if (j - i < 2) {
      local.users_dropped++;
      local.records_dropped += j - i;
    } else {
      local.records_dropped++;
      for (std::size_t k = i + 1; k < j; ++k) {
        InteractionRecord rec = ds.records[order[k]];
        rec.contexts.push_back(ds.records[order[k - 1]].item);
        out.records.push_back(std::move(rec));
      }
    }
    i = j;
  }
  if (local.users_dropped > 0) {
    spdlog::info("last-clicked context: dropped {} users with fewer than 2 interactions",
                 local.users_dropped);
  }
  if (stats) *stats = local;
  return out;
}

Dataset filter(const Dataset& ds, const FilterOptions& options) {
  std::vector<const InteractionRecord*> kept;
  kept.reserve(ds.records.size());
  for (const auto& r : ds.records) kept.push_back(&r);

  if (options.top_items) {
    std::vector<std::size_t> counts(ds.item_count(), 0);
    for (const auto* r : kept) counts[r->item]++;
    std::vector<std::uint32_t> items(ds.item_count());
    std::iota(items.begin(), items.end(), 0);
    std::stable_sort(items.begin(), items.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return counts[a] > counts[b]; });
    std::vector<bool> keep(ds.item_count(), false);
    for (std::size_t k = 0; k < std::min(*options.top_items, items.size()); ++k) {
      keep[items[k]] = true;
    }
    std::erase_if(kept, [&](const InteractionRecord* r) { return !keep[r->item]; });
  }

  std::vector<std::size_t> per_user(ds.user_count(), 0);
  for (const auto* r : kept) per_user[r->user]++;
  std::erase_if(kept, [&](const InteractionRecord* r) {
    return per_user[r->user] < options.min_interactions_per_user;
  });
  if (kept.empty()) throw DataError("filter: no interactions survive filtering");

  std::vector<bool> user_used(ds.user_count(), false), item_used(ds.item_count(), false);
  for (const auto* r : kept) {
    user_used[r->user] = true;
    item_used[r->item] = true;
  }
  auto remap = [](const std::vector<bool>& used, const IdMap& old_ids, IdMap& new_ids) {
    std::vector<std::uint32_t> m(used.size(), 0);
    for (std::size_t i = 0; i < used.size(); ++i) {
      if (used[i]) m[i] = new_ids.intern(old_ids.key(static_cast<std::uint32_t>(i)));
    }
    return m;
  };

  Dataset out;
  out.ids = ds.ids;
  out.ids[FieldSchema::kUser] = IdMap();
  out.ids[FieldSchema::kItem] = IdMap();
  const auto user_map = remap(user_used, ds.ids[FieldSchema::kUser], out.ids[FieldSchema::kUser]);
  const auto item_map = remap(item_used, ds.ids[FieldSchema::kItem], out.ids[FieldSchema::kItem]);
  out.has_timestamps = ds.has_timestamps;
  out.schema = ds.schema;
  out.schema.set_cardinality(FieldSchema::kUser, out.ids[FieldSchema::kUser].size());
  out.schema.set_cardinality(FieldSchema::kItem, out.ids[FieldSchema::kItem].size());
  out.records.reserve(kept.size());
  for (const auto* r : kept) {
    InteractionRecord rec = *r;
    rec.user = user_map[r->user];
    rec.item = item_map[r->item];
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace gce
