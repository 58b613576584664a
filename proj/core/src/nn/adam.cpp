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

#include "ccem/nn/adam.hpp"

#include <cmath>

#include "ccem/error.hpp"

namespace ccem::nn {

AdamOptimizer::AdamOptimizer(const ParamLayout& layout,
                             std::vector<std::string> segment_names, double lr) {
  state_.lr = lr;
  state_.m.assign(layout.total_size(), 0.0);
  state_.v.assign(layout.total_size(), 0.0);
  if (segment_names.empty()) {
    for (int i = 0; i < static_cast<int>(layout.segments().size()); ++i) {
      segment_ids_.push_back(i);
    }
  } else {
    for (const std::string& name : segment_names) {
      segment_ids_.push_back(layout.id(name));
    }
  }
  for (int id : segment_ids_) segments_.push_back(layout.segment(id));
}

void AdamOptimizer::step(ParamVector& params, const ParamVector& grad) {
  if (params.size() != state_.m.size() || grad.size() != state_.m.size()) {
    throw DimensionError("AdamOptimizer: parameter/gradient size mismatch");
  }
  state_.step_count += 1;
  const double b1 = state_.beta1;
  const double b2 = state_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state_.step_count));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state_.step_count));

  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const Segment& s = segments_[k];
    auto g = grad.seg(segment_ids_[k]);
    auto p = params.seg(segment_ids_[k]);
    for (std::size_t i = 0; i < s.size; ++i) {
      const double gi = g[i];
      if (!std::isfinite(gi)) {
        throw NonFiniteError("AdamOptimizer: non-finite gradient in segment '" +
                             s.name + "'");
      }
      const std::size_t j = s.offset + i;
      state_.m[j] = b1 * state_.m[j] + (1.0 - b1) * gi;
      state_.v[j] = b2 * state_.v[j] + (1.0 - b2) * gi * gi;
      const double m_hat = state_.m[j] / bc1;
      const double v_hat = state_.v[j] / bc2;
      p[i] -= state_.lr * m_hat / (std::sqrt(v_hat) + state_.eps);
    }
  }
}

void ema_update(std::span<double> target, std::span<const double> online,
                double zeta) {
  if (target.size() != online.size()) {
    throw DimensionError("ema_update: size mismatch (" +
                         std::to_string(target.size()) + " vs " +
                         std::to_string(online.size()) + ")");
  }
  if (zeta < 0.0 || zeta > 1.0) {
    throw Error("ema_update: zeta must be in [0, 1]");
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i] = (1.0 - zeta) * target[i] + zeta * online[i];
  }
}

}  // namespace ccem::nn
