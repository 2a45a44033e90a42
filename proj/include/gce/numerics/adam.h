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
#include <span>
#include <vector>

#include "gce/numerics/autodiff.h"

namespace gce {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols) : m(rows, cols), v(rows, cols) {}

  DenseMatrix m;
  DenseMatrix v;
  std::int64_t step = 0;
};

// One bias-corrected Adam update of `param` in place. Throws NumericError on a
// non-finite gradient and ShapeError on mismatched shapes.
void adam_step(AdamState& state, const AdamOptions& opts, DenseMatrix& param,
               const DenseMatrix& grad);

// Adam over a fixed list of parameters, states aligned by position.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamOptions opts);

  void zero_grad();
  void step();

  const AdamOptions& options() const { return opts_; }
  const AdamState& state(std::size_t i) const { return states_.at(i); }

 private:
  std::vector<Parameter*> params_;
  std::vector<AdamState> states_;
  AdamOptions opts_;
};

}  // namespace gce
