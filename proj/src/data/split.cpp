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

#include "gce/data/split.h"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "gce/error.h"

namespace gce {

Split leave_one_out_split(const Dataset& ds) {
  if (ds.records.empty()) throw DataError("split: dataset is empty");
  if (!ds.has_timestamps) {
    spdlog::warn("split: no timestamps, holding out the last two records per user in file order");
  }
  std::vector<std::vector<std::size_t>> by_user(ds.user_count());
  for (std::size_t i = 0; i < ds.records.size(); ++i) by_user.at(ds.records[i].user).push_back(i);

  std::vector<int> role(ds.records.size(), 0);  // 0 train, 1 validation, 2 test
  for (std::size_t u = 0; u < by_user.size(); ++u) {
    auto& idx = by_user[u];
    if (idx.empty()) continue;
    if (idx.size() < 3) {
      throw DataError("split: user '" + ds.ids[FieldSchema::kUser].key(static_cast<std::uint32_t>(u)) +
                      "' has " + std::to_string(idx.size()) + " interactions, need at least 3");
    }
    if (ds.has_timestamps) {
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return *ds.records[a].timestamp < *ds.records[b].timestamp;
      });
    }
    role[idx[idx.size() - 1]] = 2;
    role[idx[idx.size() - 2]] = 1;
  }
  Split s;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    (role[i] == 0 ? s.train : role[i] == 1 ? s.validation : s.test).push_back(ds.records[i]);
  }
  return s;
}

}  // namespace gce
