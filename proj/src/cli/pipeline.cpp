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

#include "gce/cli/pipeline.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "gce/core/binary_io.h"
#include "gce/error.h"

namespace gce {

namespace {

constexpr char kCacheMagic[4] = {'G', 'C', 'E', 'D'};
constexpr std::string_view kWhat = "dataset cache";

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
}

void fnv_file(std::uint64_t& h, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    fnv(h, std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
}

template <typename T>
T get(std::istream& in) {
  return bin::get<T, DataError>(in, kWhat);
}

void put_records(std::ostream& out, const std::vector<InteractionRecord>& rs) {
  bin::put<std::uint64_t>(out, rs.size());
  for (const auto& r : rs) {
    bin::put<std::uint32_t>(out, r.user);
    bin::put<std::uint32_t>(out, r.item);
    bin::put<std::uint32_t>(out, static_cast<std::uint32_t>(r.contexts.size()));
    for (std::uint32_t c : r.contexts) bin::put<std::uint32_t>(out, c);
    bin::put<std::uint8_t>(out, r.timestamp ? 1 : 0);
    bin::put<std::int64_t>(out, r.timestamp.value_or(0));
  }
}

std::vector<InteractionRecord> get_records(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  std::vector<InteractionRecord> rs;
  rs.reserve(std::min<std::uint64_t>(n, 1u << 24));
  for (std::uint64_t i = 0; i < n; ++i) {
    InteractionRecord r;
    r.user = get<std::uint32_t>(in);
    r.item = get<std::uint32_t>(in);
    const auto nc = get<std::uint32_t>(in);
    if (nc > 64) throw DataError("dataset cache: implausible context count");
    for (std::uint32_t c = 0; c < nc; ++c) r.contexts.push_back(get<std::uint32_t>(in));
    const bool has_ts = get<std::uint8_t>(in) != 0;
    const auto ts = get<std::int64_t>(in);
    if (has_ts) r.timestamp = ts;
    rs.push_back(std::move(r));
  }
  return rs;
}

}  // namespace

Prepared prepare(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw ConfigError("data.path is not set");
  if (!std::filesystem::exists(cfg.data_path)) {
    throw DataError("data file not found: " + cfg.data_path.string());
  }
  Prepared p;
  Dataset ds = load_tabular(cfg.data_path, cfg.tabular);
  p.raw = {ds.user_count(), ds.item_count(), ds.records.size()};
  spdlog::info("loaded {}: {} users, {} items, {} interactions", cfg.data_path.string(),
               p.raw.users, p.raw.items, p.raw.interactions);
  if (!cfg.side_info_path.empty()) {
    // strict check against the raw ids; filtering may drop entities later
    load_side_info(cfg.side_info_path, ds, field_index(ds.schema, cfg.side_info_field),
                   cfg.side_info_delimiter);
  }
  if (cfg.context == ContextMode::last_item) ds = derive_last_clicked_context(ds, &p.derive);
  ds = filter(ds, cfg.filter);
  p.split = leave_one_out_split(ds);
  ds.records.clear();
  p.dataset = std::move(ds);
  p.fingerprint = data_fingerprint(cfg);
  return p;
}

std::uint64_t data_fingerprint(const RunConfig& cfg) {
  std::uint64_t h = kFnvOffset;
  fnv_file(h, cfg.data_path);
  if (!cfg.side_info_path.empty()) fnv_file(h, cfg.side_info_path);
  for (const auto& [k, v] : data_keys(cfg)) {
    fnv(h, k);
    fnv(h, "=");
    fnv(h, v);
    fnv(h, "\n");
  }
  return h;
}

void write_cache(std::ostream& out, const Prepared& p) {
  out.write(kCacheMagic, 4);
  bin::put<std::uint8_t>(out, kCacheVersion);
  bin::put<std::uint64_t>(out, p.fingerprint);
  bin::put<std::uint64_t>(out, p.raw.users);
  bin::put<std::uint64_t>(out, p.raw.items);
  bin::put<std::uint64_t>(out, p.raw.interactions);
  bin::put<std::uint64_t>(out, p.derive.users_dropped);
  bin::put<std::uint64_t>(out, p.derive.records_dropped);
  const auto& fields = p.dataset.schema.fields();
  bin::put<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  for (std::size_t f = 0; f < fields.size(); ++f) {
    bin::put_string(out, fields[f].name);
    bin::put<std::uint64_t>(out, fields[f].cardinality);
    const auto& keys = p.dataset.ids.at(f).keys();
    bin::put<std::uint64_t>(out, keys.size());
    for (const auto& k : keys) bin::put_string(out, k);
  }
  bin::put<std::uint8_t>(out, p.dataset.has_timestamps ? 1 : 0);
  put_records(out, p.split.train);
  put_records(out, p.split.validation);
  put_records(out, p.split.test);
  if (!out) throw DataError("dataset cache: write failed");
}

Prepared read_cache(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCacheMagic, 4) != 0) throw DataError("dataset cache: bad magic");
  const auto version = get<std::uint8_t>(in);
  if (version != kCacheVersion) {
    throw DataError("dataset cache: format version " + std::to_string(version) + ", expected " +
                    std::to_string(kCacheVersion) + "; rerun ingest");
  }
  Prepared p;
  p.fingerprint = get<std::uint64_t>(in);
  p.raw.users = get<std::uint64_t>(in);
  p.raw.items = get<std::uint64_t>(in);
  p.raw.interactions = get<std::uint64_t>(in);
  p.derive.users_dropped = get<std::uint64_t>(in);
  p.derive.records_dropped = get<std::uint64_t>(in);
  const auto nf = get<std::uint32_t>(in);
  if (nf < 2 || nf > 64) throw DataError("dataset cache: implausible field count");
  std::vector<Field> fields;
  for (std::uint32_t f = 0; f < nf; ++f) {
    Field fd;
    fd.name = bin::get_string<DataError>(in, kWhat);
    fd.cardinality = get<std::uint64_t>(in);
    fields.push_back(fd);
    IdMap ids;
    const auto nk = get<std::uint64_t>(in);
    for (std::uint64_t k = 0; k < nk; ++k) ids.intern(bin::get_string<DataError>(in, kWhat));
    if (ids.size() != nk) throw DataError("dataset cache: duplicate id key");
    p.dataset.ids.push_back(std::move(ids));
  }
  p.dataset.schema = FieldSchema(std::move(fields));
  p.dataset.has_timestamps = get<std::uint8_t>(in) != 0;
  p.split.train = get_records(in);
  p.split.validation = get_records(in);
  p.split.test = get_records(in);
  return p;
}

std::filesystem::path cache_path(const RunConfig& cfg) { return cfg.cache_dir / "dataset.bin"; }

Prepared load_cache(const RunConfig& cfg) {
  const auto path = cache_path(cfg);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("no dataset cache at " + path.string() + "; run ingest first");
  Prepared p = read_cache(in);
  if (p.fingerprint != data_fingerprint(cfg)) {
    throw DataError("dataset cache " + path.string() + " is stale for this config; rerun ingest");
  }
  return p;
}

std::string stats_json(const Prepared& p) {
  nlohmann::ordered_json j;
  j["users"] = p.raw.users;
  j["items"] = p.raw.items;
  j["interactions"] = p.raw.interactions;
  nlohmann::ordered_json fields = nlohmann::ordered_json::array();
  for (const auto& f : p.dataset.schema.fields()) {
    fields.push_back({{"name", f.name}, {"cardinality", f.cardinality}});
  }
  j["fields"] = fields;
  j["derive_users_dropped"] = p.derive.users_dropped;
  j["derive_records_dropped"] = p.derive.records_dropped;
  j["train"] = p.split.train.size();
  j["validation"] = p.split.validation.size();
  j["test"] = p.split.test.size();
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(p.fingerprint));
  j["fingerprint"] = fp;
  return j.dump(2);
}

Experiment make_experiment(const RunConfig& cfg, Prepared data) {
  Experiment ex;
  ex.data = std::move(data);
  ex.graph = build_graph(ex.data.split.train, ex.data.dataset.schema, cfg.graph);
  spdlog::info("graph: {} nodes, {} edges", ex.graph.node_count(), ex.graph.edge_count());
  if (cfg.model.provider == ProviderKind::gce_si) {
    const std::size_t field = field_index(ex.data.dataset.schema, cfg.side_info_field);
    ex.side_info.push_back(load_side_info(cfg.side_info_path, ex.data.dataset, field,
                                          cfg.side_info_delimiter, UnknownEntity::skip));
  }
  ex.features = compose_features(ex.graph.indexer, ex.side_info);
  return ex;
}

std::unique_ptr<Model> make_model(const RunConfig& cfg, const Experiment& ex, std::uint64_t seed) {
  Rng init = Rng(seed).substream("init");
  return std::make_unique<Model>(cfg.model, ex.graph, &ex.features, init);
}

std::filesystem::path checkpoint_path(const RunConfig& cfg, std::uint64_t seed) {
  return cfg.output_dir /
         (to_string(cfg.model.head) + "-" + to_string(cfg.model.provider) + "-seed" +
          std::to_string(seed) + ".ckpt");
}

}  // namespace gce
