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

#include "gce/numerics/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gce/error.h"

namespace gce {

namespace {

double evaluate(const std::function<ad::Var(ad::Tape&)>& loss) {
  ad::Tape tape;
  const double v = loss(tape).value()(0, 0);
  if (!std::isfinite(v)) throw NumericError("check_gradient: non-finite loss at probe point");
  return v;
}

}  // namespace

GradCheckResult check_gradient(const std::function<ad::Var(ad::Tape&)>& loss,
                               std::span<Parameter* const> params, double h,
                               std::size_t max_coords_per_param) {
  if (!(h > 0.0)) throw ConfigError("check_gradient: step must be positive");
  for (Parameter* p : params) p->zero_grad();
  {
    ad::Tape tape;
    ad::Var out = loss(tape);
    if (!std::isfinite(out.value()(0, 0))) {
      throw NumericError("check_gradient: non-finite loss at probe point");
    }
    tape.backward(out);
  }
  std::vector<DenseMatrix> analytic;
  for (Parameter* p : params) analytic.push_back(p->grad);

  GradCheckResult res;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    const std::size_t n = p.value.size();
    const std::size_t probes = max_coords_per_param == 0 ? n : std::min(n, max_coords_per_param);
    for (std::size_t s = 0; s < probes; ++s) {
      const std::size_t i = probes == n ? s : (s * n) / probes;
      const double saved = p.value.data()[i];
      p.value.data()[i] = saved + h;
      const double up = evaluate(loss);
      p.value.data()[i] = saved - h;
      const double down = evaluate(loss);
      p.value.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k].data()[i];
      const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
      ++res.coordinates;
      if (err > res.max_rel_error || res.worst_parameter.empty()) {
        if (err >= res.max_rel_error) {
          res.max_rel_error = err;
          res.worst_parameter = p.name;
          res.worst_index = i;
          res.analytic = a;
          res.numeric = numeric;
        }
      }
    }
  }
  return res;
}

}  // namespace gce
