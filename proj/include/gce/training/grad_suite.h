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

#include <cstdint>
#include <string>
#include <vector>

#include "gce/embeddings/provider.h"
#include "gce/models/model.h"
#include "gce/numerics/gradcheck.h"

namespace gce {

inline constexpr double kGradTolerance = 1e-4;

struct GradSuiteEntry {
  HeadKind head;
  ProviderKind provider;
  GradCheckResult result;
  bool passed() const { return result.max_rel_error < kGradTolerance; }
};

// Full BPR objective gradient against central differences for every head x
// provider pair on a fixed 10-interaction user/item/context toy.
std::vector<GradSuiteEntry> run_gradient_suite(Activation activation = Activation::relu,
                                               std::uint64_t seed = 7);

}  // namespace gce
