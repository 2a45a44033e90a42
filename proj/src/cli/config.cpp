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

#include "gce/cli/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "gce/error.h"

namespace gce {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& want) {
  throw ConfigError("config key '" + key + "': invalid value '" + value + "' (expected " + want + ")");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key, v, "a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key, v, "true|false");
}

char parse_delimiter(const std::string& key, const std::string& v) {
  if (v == "tab" || v == "\\t") return '\t';
  if (v == "comma") return ',';
  if (v == "space") return ' ';
  if (v == "pipe") return '|';
  if (v.size() == 1) return v[0];
  bad(key, v, "tab|comma|space|pipe or one character");
}

std::optional<std::size_t> parse_optional_index(const std::string& key, const std::string& v) {
  if (v == "none" || v.empty()) return std::nullopt;
  return parse_number<std::size_t>(key, v);
}

template <typename T>
std::vector<T> parse_number_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(parse_number<T>(key, item));
  return out;
}

ContextMode parse_context(const std::string& key, const std::string& v) {
  if (v == "last_item") return ContextMode::last_item;
  if (v == "columns") return ContextMode::columns;
  if (v == "none") return ContextMode::none;
  bad(key, v, "last_item|columns|none");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

struct KeySpec {
  const char* key;
  const char* default_value;
  Setter set;
};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
    {"data.path", "", [](RunConfig& c, auto&, auto& v) { c.data_path = v; }},
    {"data.delimiter", "tab",
     [](RunConfig& c, auto& k, auto& v) { c.tabular.delimiter = parse_delimiter(k, v); }},
    {"data.user_column", "0",
     [](RunConfig& c, auto& k, auto& v) { c.tabular.user_column = parse_number<std::size_t>(k, v); }},
    {"data.item_column", "1",
     [](RunConfig& c, auto& k, auto& v) { c.tabular.item_column = parse_number<std::size_t>(k, v); }},
    {"data.rating_column", "2",
     [](RunConfig& c, auto& k, auto& v) { c.tabular.rating_column = parse_optional_index(k, v); }},
    {"data.timestamp_column", "3",
     [](RunConfig& c, auto& k, auto& v) { c.tabular.timestamp_column = parse_optional_index(k, v); }},
    {"data.context_columns", "",
     [](RunConfig& c, auto& k, auto& v) {
       c.tabular.context_columns = parse_number_list<std::size_t>(k, v);
     }},
    {"data.context_names", "",
     [](RunConfig& c, auto&, auto& v) { c.tabular.context_names = split_list(v); }},
    {"data.has_header", "false",
     [](RunConfig& c, auto& k, auto& v) { c.tabular.has_header = parse_bool(k, v); }},
    {"data.context", "last_item",
     [](RunConfig& c, auto& k, auto& v) { c.context = parse_context(k, v); }},
    {"data.min_interactions", "3",
     [](RunConfig& c, auto& k, auto& v) {
       c.filter.min_interactions_per_user = parse_number<std::size_t>(k, v);
     }},
    {"data.top_items", "none",
     [](RunConfig& c, auto& k, auto& v) { c.filter.top_items = parse_optional_index(k, v); }},
    {"data.side_info", "", [](RunConfig& c, auto&, auto& v) { c.side_info_path = v; }},
    {"data.side_info_field", "item", [](RunConfig& c, auto&, auto& v) { c.side_info_field = v; }},
    {"data.side_info_delimiter", "tab",
     [](RunConfig& c, auto& k, auto& v) { c.side_info_delimiter = parse_delimiter(k, v); }},
    {"graph.context_edges", "true",
     [](RunConfig& c, auto& k, auto& v) { c.graph.context_edges = parse_bool(k, v); }},
    {"model", "fm", [](RunConfig& c, auto&, auto& v) { c.model.head = parse_head(v); }},
    {"provider", "table", [](RunConfig& c, auto&, auto& v) { c.model.provider = parse_provider(v); }},
    {"embedding.dim", "64",
     [](RunConfig& c, auto& k, auto& v) { c.model.embedding.dim = parse_number<std::size_t>(k, v); }},
    {"embedding.activation", "relu",
     [](RunConfig& c, auto&, auto& v) { c.model.embedding.activation = parse_activation(v); }},
    {"embedding.dropout", "0",
     [](RunConfig& c, auto& k, auto& v) {
       c.model.embedding.dropout = parse_number<double>(k, v);
       validate_dropout(c.model.embedding.dropout);
     }},
    {"embedding.layers", "1",
     [](RunConfig& c, auto& k, auto& v) { c.model.embedding.layers = parse_number<std::size_t>(k, v); }},
    {"embedding.shared_weight", "true",
     [](RunConfig& c, auto& k, auto& v) { c.model.embedding.shared_weight = parse_bool(k, v); }},
    {"ncf.hidden", "128,64",
     [](RunConfig& c, auto& k, auto& v) { c.model.ncf_hidden = parse_number_list<std::size_t>(k, v); }},
    {"train.lr", "0.001", [](RunConfig& c, auto& k, auto& v) { c.train.lr = parse_number<double>(k, v); }},
    {"train.batch_size", "1024",
     [](RunConfig& c, auto& k, auto& v) { c.train.batch_size = parse_number<std::size_t>(k, v); }},
    {"train.max_epochs", "150",
     [](RunConfig& c, auto& k, auto& v) { c.train.max_epochs = parse_number<std::size_t>(k, v); }},
    {"train.patience", "5",
     [](RunConfig& c, auto& k, auto& v) { c.train.patience = parse_number<std::size_t>(k, v); }},
    {"train.negatives", "1",
     [](RunConfig& c, auto& k, auto& v) { c.train.negatives = parse_number<std::size_t>(k, v); }},
    {"train.negative_key", "user_context",
     [](RunConfig& c, auto&, auto& v) { c.train.negative_key = parse_negative_key(v); }},
    {"train.log_elapsed", "false",
     [](RunConfig& c, auto& k, auto& v) { c.train.log_elapsed = parse_bool(k, v); }},
    {"probe.full_epoch", "false",
     [](RunConfig& c, auto& k, auto& v) { c.probe_full_epoch = parse_bool(k, v); }},
    {"eval.ks", "10,20",
     [](RunConfig& c, auto& k, auto& v) { c.eval_ks = parse_number_list<std::size_t>(k, v); }},
    {"eval.exclude_train_positives", "false",
     [](RunConfig& c, auto& k, auto& v) { c.exclude_train_positives = parse_bool(k, v); }},
    {"seeds", "0",
     [](RunConfig& c, auto& k, auto& v) { c.seeds = parse_number_list<std::uint64_t>(k, v); }},
    {"grid.lr", "0.0001,0.0005,0.001,0.005,0.01",
     [](RunConfig& c, auto& k, auto& v) { c.grid_lr = parse_number_list<double>(k, v); }},
    {"grid.batch_size", "256,512,1024,2048",
     [](RunConfig& c, auto& k, auto& v) { c.grid_batch = parse_number_list<std::size_t>(k, v); }},
    {"grid.dropout", "0,0.15,0.5",
     [](RunConfig& c, auto& k, auto& v) { c.grid_dropout = parse_number_list<double>(k, v); }},
    {"grid.seed", "0",
     [](RunConfig& c, auto& k, auto& v) { c.grid_seed = parse_number<std::uint64_t>(k, v); }},
    {"output_dir", "out", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; }},
    {"cache_dir", "", [](RunConfig& c, auto&, auto& v) { c.cache_dir = v; }},
  };
  return table;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (kv.has(key)) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    kv.set(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

RunConfig resolve(const KeyValueConfig& kv) {
  const auto& table = key_table();
  for (const auto& [key, value] : kv.values()) {
    bool known = false;
    for (const auto& spec : table) known = known || key == spec.key;
    if (!known) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig cfg;
  for (const auto& spec : table) {
    auto it = kv.values().find(spec.key);
    const std::string value = it == kv.values().end() ? spec.default_value : it->second;
    spec.set(cfg, spec.key, value);
    cfg.resolved[spec.key] = value;
  }
  if (cfg.cache_dir.empty()) cfg.cache_dir = cfg.output_dir / "cache";
  if (cfg.data_path.empty()) throw ConfigError("data.path is required");
  if (cfg.model.provider == ProviderKind::gce_si && cfg.side_info_path.empty()) {
    throw ConfigError("provider gce-si requires data.side_info");
  }
  if (cfg.model.embedding.dim == 0) throw ConfigError("embedding.dim must be positive");
  if (cfg.model.embedding.layers == 0) throw ConfigError("embedding.layers must be positive");
  if (cfg.seeds.empty()) throw ConfigError("seeds must list at least one seed");
  if (cfg.eval_ks.empty()) throw ConfigError("eval.ks must list at least one K");
  for (std::size_t k : cfg.eval_ks) {
    if (k == 0) throw ConfigError("eval.ks entries must be at least 1");
  }
  if (cfg.context == ContextMode::columns && cfg.tabular.context_columns.empty()) {
    throw ConfigError("data.context = columns needs data.context_columns");
  }
  if (cfg.context != ContextMode::columns && !cfg.tabular.context_columns.empty()) {
    throw ConfigError("data.context_columns is only used with data.context = columns");
  }
  for (double d : cfg.grid_dropout) validate_dropout(d);
  if (cfg.train.batch_size == 0 || cfg.train.negatives == 0 || cfg.train.max_epochs == 0 ||
      !(cfg.train.lr > 0.0)) {
    throw ConfigError("train.lr, train.batch_size, train.negatives and train.max_epochs must be positive");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return resolve(KeyValueConfig::load(path));
}

std::map<std::string, std::string> data_keys(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : cfg.resolved) {
    if (k.rfind("data.", 0) == 0) out[k] = v;
  }
  return out;
}

}  // namespace gce
