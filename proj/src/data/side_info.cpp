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

#include "gce/data/side_info.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <utility>

#include "gce/error.h"

namespace gce {

SideInfoMatrix load_side_info(std::istream& in, const Dataset& ds, std::size_t field,
                              char delimiter, const std::string& source, UnknownEntity unknown) {
  if (field >= ds.schema.size()) throw ConfigError("side info: no field " + std::to_string(field));
  SideInfoMatrix si;
  si.field = field;
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto pos = line.find(delimiter);
    if (pos == std::string::npos || pos == 0 || pos + 1 == line.size()) {
      throw ParseError(source, lineno, "expected 'entity" + std::string(1, delimiter) + "feature'");
    }
    const std::string entity = line.substr(0, pos);
    const std::string feature = line.substr(pos + 1);
    const auto id = ds.ids[field].find(entity);
    if (!id) {
      if (unknown == UnknownEntity::skip) continue;
      throw DataError(source + ":" + std::to_string(lineno) + ": unknown " +
                      ds.schema[field].name + " '" + entity + "'");
    }
    pairs.emplace(*id, si.vocabulary.intern(feature));
  }
  std::vector<Triplet> entries;
  entries.reserve(pairs.size());
  for (const auto& [row, col] : pairs) entries.push_back({row, col, 1.0});
  si.features = SparseMatrix::from_triplets(ds.schema[field].cardinality, si.vocabulary.size(),
                                            std::move(entries));
  return si;
}

SideInfoMatrix load_side_info(const std::filesystem::path& path, const Dataset& ds,
                              std::size_t field, char delimiter, UnknownEntity unknown) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open side-info file '" + path.string() + "'");
  return load_side_info(in, ds, field, delimiter, path.string(), unknown);
}

std::size_t field_index(const FieldSchema& schema, const std::string& name) {
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema[f].name == name) return f;
  }
  throw ConfigError("no field named '" + name + "'");
}

}  // namespace gce
