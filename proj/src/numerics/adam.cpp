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

#include "gce/numerics/adam.h"

#include <cmath>
#include <string>

#include "gce/error.h"

namespace gce {

void adam_step(AdamState& state, const AdamOptions& opts, DenseMatrix& param,
               const DenseMatrix& grad) {
  if (!param.same_shape(grad)) throw ShapeError("adam_step: gradient shape differs from parameter");
  if (state.m.empty() && !param.empty()) state = AdamState(param.rows(), param.cols());
  if (!state.m.same_shape(param)) throw ShapeError("adam_step: moment shape differs from parameter");
  if (!grad.all_finite()) throw NumericError("adam_step: non-finite gradient");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(opts.beta1, t);
  const double c2 = 1.0 - std::pow(opts.beta2, t);
  const double* g = grad.data();
  double* m = state.m.data();
  double* v = state.v.data();
  double* p = param.data();
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = opts.beta1 * m[i] + (1.0 - opts.beta1) * g[i];
    v[i] = opts.beta2 * v[i] + (1.0 - opts.beta2) * g[i] * g[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    p[i] -= opts.lr * m_hat / (std::sqrt(v_hat) + opts.epsilon);
  }
}

Adam::Adam(std::vector<Parameter*> params, AdamOptions opts)
  : params_(std::move(params)), opts_(opts) {
  states_.reserve(params_.size());
  for (const Parameter* p : params_) states_.emplace_back(p->value.rows(), p->value.cols());
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

void Adam::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    try {
      adam_step(states_[i], opts_, params_[i]->value, params_[i]->grad);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " for parameter '" + params_[i]->name + "'");
    }
  }
}

}  // namespace gce
