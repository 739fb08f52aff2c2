// Copyright 2026 The gentac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Central finite-difference oracle for tape gradients. Lives in test code
// only and shares nothing with the backward implementations it checks.

#include "gentac/numeric/tape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace gentac::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // "name[index]"
  long checked = 0;
};

/// Relative error with an absolute floor so that two near-zero gradients
/// compare as equal instead of dividing noise by noise.
inline double relative_error(double analytic, double numeric, double floor = 1e-8) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Compares the tape gradient of `loss_fn` against central differences for
/// every scalar of every parameter in `params`.
inline GradCheckResult gradient_check(numeric::ParameterSet& params,
                                      const std::function<numeric::Var(numeric::Tape&)>& loss_fn,
                                      double h = 1e-5) {
  params.zero_grad();
  {
    numeric::Tape tape;
    tape.backward(loss_fn(tape));
  }
  GradCheckResult result;
  for (auto& p : params) {
    for (numeric::Index i = 0; i < p->value.size(); ++i) {
      double& x = p->value.data()[i];
      const double saved = x;
      x = saved + h;
      double up;
      {
        numeric::Tape t;
        up = loss_fn(t).value()(0, 0);
      }
      x = saved - h;
      double down;
      {
        numeric::Tape t;
        down = loss_fn(t).value()(0, 0);
      }
      x = saved;
      const double fd = (up - down) / (2.0 * h);
      const double err = relative_error(p->grad.data()[i], fd);
      ++result.checked;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst = p->name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace gentac::testing
