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
#include <functional>
#include <span>
#include <string>

#include "gce/numerics/autodiff.h"

namespace gce {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

// Compares tape gradients of a scalar loss against central differences,
// coordinate by coordinate. Error per coordinate is
// |analytic - numeric| / max(1, |analytic|). `loss` must build a fresh 1x1
// result on the given tape from the current parameter values and must be
// deterministic. When max_coords_per_param is nonzero, only that many evenly
// spaced coordinates of each parameter are probed.
GradCheckResult check_gradient(const std::function<ad::Var(ad::Tape&)>& loss,
                               std::span<Parameter* const> params, double h = 1e-5,
                               std::size_t max_coords_per_param = 0);

}  // namespace gce
