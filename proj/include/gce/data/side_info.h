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
#include <filesystem>
#include <istream>
#include <string>

#include "gce/data/dataset.h"
#include "gce/numerics/sparse_matrix.h"

namespace gce {

// Multi-hot features of one field: cardinality x vocabulary, entries in {0, 1}.
struct SideInfoMatrix {
  std::size_t field = 0;
  SparseMatrix features;
  IdMap vocabulary;
};

// What to do with a side-info row whose entity is not in the dataset.
// `skip` is for datasets that were filtered after the side info was checked
// against the raw file.
enum class UnknownEntity { error, skip };

// Reads "entity_key feature_token" pairs (one per line). Entity keys are raw
// keys of `field`; unknown keys raise DataError unless skipped. Repeated
// pairs collapse.
SideInfoMatrix load_side_info(std::istream& in, const Dataset& ds, std::size_t field,
                              char delimiter = '\t', const std::string& source = "<stream>",
                              UnknownEntity unknown = UnknownEntity::error);
SideInfoMatrix load_side_info(const std::filesystem::path& path, const Dataset& ds,
                              std::size_t field, char delimiter = '\t',
                              UnknownEntity unknown = UnknownEntity::error);

// Index of the schema field called `name`; ConfigError when absent.
std::size_t field_index(const FieldSchema& schema, const std::string& name);

}  // namespace gce
