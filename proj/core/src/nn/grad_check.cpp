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

#include "ccem/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "ccem/error.hpp"

namespace ccem::nn {

GradCheckReport finite_diff_check(
    const std::function<double(const ParamVector&)>& loss_fn,
    const ParamVector& at, const ParamVector& analytic_grad,
    const GradCheckOptions& options) {
  if (at.size() != analytic_grad.size()) {
    throw DimensionError("finite_diff_check: params/grad size mismatch");
  }
  std::vector<int> ids;
  if (options.segments.empty()) {
    for (int i = 0; i < static_cast<int>(at.layout().segments().size()); ++i) {
      ids.push_back(i);
    }
  } else {
    for (const std::string& name : options.segments) {
      ids.push_back(at.layout().id(name));
    }
  }

  GradCheckReport report;
  ParamVector probe = at;
  const double h = options.fd_step;
  for (int id : ids) {
    const Segment& s = at.layout().segment(id);
    auto p = probe.seg(id);
    auto a = analytic_grad.seg(id);
    for (std::size_t i = 0; i < s.size; ++i) {
      const double saved = p[i];
      p[i] = saved + h;
      const double up = loss_fn(probe);
      p[i] = saved - h;
      const double down = loss_fn(probe);
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double denom =
          std::max({std::abs(a[i]), std::abs(numeric), options.abs_floor});
      const double rel = std::abs(a[i] - numeric) / denom;
      report.entries_checked += 1;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_segment = s.name;
        report.worst_index = i;
        report.analytic_at_worst = a[i];
        report.numeric_at_worst = numeric;
      }
    }
  }
  report.pass = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace ccem::nn
