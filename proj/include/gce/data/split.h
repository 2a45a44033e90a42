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

#include <vector>

#include "gce/data/dataset.h"

namespace gce {

struct Split {
  std::vector<InteractionRecord> train;
  std::vector<InteractionRecord> validation;
  std::vector<InteractionRecord> test;
};

// Leave-one-out per user: the last interaction goes to test, the
// second-to-last to validation, the rest to train. Order is by timestamp with
// ties broken by input position (later wins), or input order when the dataset
// has no timestamps. Throws DataError for users with fewer than 3 records.
Split leave_one_out_split(const Dataset& ds);

}  // namespace gce
