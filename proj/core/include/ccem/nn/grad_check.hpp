// Copyright 2026 The CCEM Authors
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

#ifndef CCEM_NN_GRAD_CHECK_HPP_
#define CCEM_NN_GRAD_CHECK_HPP_

#include <functional>
#include <string>

#include "ccem/nn/param_vector.hpp"

namespace ccem::nn {

struct GradCheckOptions {
  double fd_step = 1e-5;       // central-difference step
  double tolerance = 1e-4;     // max allowed relative error
  double abs_floor = 1e-4;     // denominator floor for near-zero entries
  // Restrict the check to these segments; empty = all segments.
  std::vector<std::string> segments;
};

struct GradCheckReport {
  bool pass = false;
  double max_rel_error = 0.0;
  std::string worst_segment;
  std::size_t worst_index = 0;     // index within worst_segment
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  std::size_t entries_checked = 0;
};

// Compares `analytic_grad` against central finite differences of `loss_fn`
// evaluated around `at`. Relative error per entry is
// |analytic - numeric| / max(|analytic|, |numeric|, abs_floor).
// The numeric side re-evaluates loss_fn only, so it stays independent of the
// backward pass being checked. loss_fn must be deterministic.
GradCheckReport finite_diff_check(
    const std::function<double(const ParamVector&)>& loss_fn,
    const ParamVector& at, const ParamVector& analytic_grad,
    const GradCheckOptions& options = {});

}  // namespace ccem::nn

#endif  // CCEM_NN_GRAD_CHECK_HPP_
