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

#ifndef CCEM_NN_ADAM_HPP_
#define CCEM_NN_ADAM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccem/nn/param_vector.hpp"

namespace ccem::nn {

// Adam with bias correction over a subset of a ParamVector's segments.
// Moments are stored full-size so they share the parameter layout; only the
// segments named at construction are touched by step().
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step_count = 0;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamOptimizer {
 public:
  // `segment_names` selects which segments this optimizer updates. An empty
  // list means all segments.
  AdamOptimizer(const ParamLayout& layout, std::vector<std::string> segment_names,
                double lr);

  // One Adam update from `grad`. Throws NonFiniteError if the gradient of a
  // managed segment is non-finite.
  void step(ParamVector& params, const ParamVector& grad);

  const AdamState& state() const { return state_; }
  AdamState& state() { return state_; }
  const std::vector<int>& segment_ids() const { return segment_ids_; }

 private:
  AdamState state_;
  std::vector<int> segment_ids_;
  std::vector<Segment> segments_;  // resolved, for error messages
};

// theta_bar <- (1 - zeta) * theta_bar + zeta * theta, elementwise.
// Requires 0 <= zeta <= 1 and matching sizes.
void ema_update(std::span<double> target, std::span<const double> online,
                double zeta);

}  // namespace ccem::nn

#endif  // CCEM_NN_ADAM_HPP_
