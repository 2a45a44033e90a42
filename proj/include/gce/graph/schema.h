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
#include <string>
#include <vector>

namespace gce {

struct Field {
  std::string name;
  std::size_t cardinality = 0;
  friend bool operator==(const Field&, const Field&) = default;
};

// Ordered fields: user, item, then context fields.
class FieldSchema {
 public:
  FieldSchema() = default;
  // Requires at least the user and item fields.
  explicit FieldSchema(std::vector<Field> fields);

  std::size_t size() const { return fields_.size(); }
  const Field& operator[](std::size_t f) const { return fields_[f]; }
  const std::vector<Field>& fields() const { return fields_; }
  std::size_t context_count() const { return fields_.size() - 2; }
  std::size_t total_nodes() const;
  void set_cardinality(std::size_t f, std::size_t n) { fields_.at(f).cardinality = n; }

  // Throws DataError unless every cardinality is at least 1.
  void require_nonempty() const;

  static constexpr std::size_t kUser = 0;
  static constexpr std::size_t kItem = 1;

  friend bool operator==(const FieldSchema&, const FieldSchema&) = default;

 private:
  std::vector<Field> fields_;
};

struct NodeRef {
  std::size_t field = 0;
  std::size_t local = 0;
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

// Global node ids: offset(field) + local id, offsets being prefix sums of the
// cardinalities in schema order.
class NodeIndexer {
 public:
  NodeIndexer() = default;
  explicit NodeIndexer(const FieldSchema& schema);

  std::size_t global_id(std::size_t field, std::size_t local) const;
  NodeRef local_of(std::size_t global) const;
  std::size_t offset(std::size_t field) const { return offsets_.at(field); }
  std::size_t cardinality(std::size_t field) const {
    return offsets_.at(field + 1) - offsets_.at(field);
  }
  std::size_t field_count() const { return offsets_.size() - 1; }
  std::size_t total() const { return offsets_.back(); }

 private:
  std::vector<std::size_t> offsets_{0};
};

}  // namespace gce
