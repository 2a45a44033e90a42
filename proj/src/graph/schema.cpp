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

#include "gce/graph/schema.h"

#include <algorithm>

#include "gce/error.h"

namespace gce {

FieldSchema::FieldSchema(std::vector<Field> fields) : fields_(std::move(fields)) {
  if (fields_.size() < 2) throw ConfigError("FieldSchema: need at least user and item fields");
}

std::size_t FieldSchema::total_nodes() const {
  std::size_t n = 0;
  for (const auto& f : fields_) n += f.cardinality;
  return n;
}

void FieldSchema::require_nonempty() const {
  for (const auto& f : fields_) {
    if (f.cardinality == 0) throw DataError("field '" + f.name + "' has no entities");
  }
}

NodeIndexer::NodeIndexer(const FieldSchema& schema) {
  offsets_.reserve(schema.size() + 1);
  for (const auto& f : schema.fields()) offsets_.push_back(offsets_.back() + f.cardinality);
}

std::size_t NodeIndexer::global_id(std::size_t field, std::size_t local) const {
  if (field + 1 >= offsets_.size()) {
    throw IndexError("global_id: field " + std::to_string(field) + " out of range");
  }
  if (local >= cardinality(field)) {
    throw IndexError("global_id: local id " + std::to_string(local) + " >= cardinality " +
                     std::to_string(cardinality(field)) + " of field " + std::to_string(field));
  }
  return offsets_[field] + local;
}

NodeRef NodeIndexer::local_of(std::size_t global) const {
  if (global >= total()) {
    throw IndexError("local_of: node " + std::to_string(global) + " >= " +
                     std::to_string(total()));
  }
  // First offset strictly greater than `global`, minus one, skipping empty fields.
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  const std::size_t field = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  return {field, global - offsets_[field]};
}

}  // namespace gce
