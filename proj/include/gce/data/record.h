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
#include <optional>
#include <vector>

namespace gce {

// One observed (user, item, contexts...) event with field-local ids.
struct InteractionRecord {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  std::vector<std::uint32_t> contexts;
  std::optional<std::int64_t> timestamp;

  std::size_t field_count() const { return 2 + contexts.size(); }
  // Field order is user, item, context_1, ..., context_{N-2}.
  std::uint32_t field_id(std::size_t f) const {
    return f == 0 ? user : f == 1 ? item : contexts[f - 2];
  }

  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

}  // namespace gce
