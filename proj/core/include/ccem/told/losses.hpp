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

#ifndef CCEM_TOLD_LOSSES_HPP_
#define CCEM_TOLD_LOSSES_HPP_

#include <span>
#include <vector>

#include "ccem/nn/param_vector.hpp"
#include "ccem/told/model.hpp"

namespace ccem::told {

// Coefficients of the temporally weighted model objective
//   sum_i lambda^i (c1 L_Q + c2 L_R + c3 L_C + L_pi).
struct LossWeights {
  double lambda = 0.5;  // temporal decay per rollout step, in (0, 1]
  double c1 = 0.1;      // value loss
  double c2 = 0.5;      // reward loss
  double c3 = 2.0;      // consistency loss
  double gamma = 0.99;  // TD discount, in [0, 1)

  void validate() const;
};

// One K-step replay slice: K+1 observations, K actions, K extrinsic rewards.
struct Trajectory {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<double>> actions;
  std::vector<double> rewards;

  int steps() const { return static_cast<int>(actions.size()); }
  void validate(int obs_dim, int action_dim) const;
};

// Raw value of one per-step loss plus the gradient it sends into the step's
// input latent. `dz` is scaled (see below); `value` is not.
struct StepLoss {
  double value = 0.0;
  std::vector<double> dz;
};

// Per-step losses. Each accumulates scale * d(value)/d(params) into `grad`
// (skipped when null) and returns scale * d(value)/d(z) in StepLoss::dz.
// `stop_params` supplies the parameters for every stop-gradient evaluation
// (TD bootstrap, the critic inside the policy loss, the target encoder).
// Training passes the live params twice; finite-difference checks pass a
// frozen copy so the probe holds the same quantities constant that the
// backward pass treats as constant.

// (Q(z,a) - (r_e + r_i + gamma * Q_target(z_next, pi(z_next))))^2, summed
// over Q heads. The bootstrap action is the noiseless policy output and the
// whole target is a constant. Throws NonFiniteError on a non-finite target.
StepLoss q_loss(const ToldModel& model, const nn::ParamVector& params,
                const nn::ParamVector& stop_params, std::span<const double> z,
                std::span<const double> action, double r_e, double r_i,
                std::span<const double> z_next, double gamma, double scale,
                nn::ParamVector* grad);

// -Q(z, pi(z)); gradient reaches only the policy segments. With twin Q heads
// the smaller head is used.
StepLoss policy_loss(const ToldModel& model, const nn::ParamVector& params,
                     const nn::ParamVector& stop_params,
                     std::span<const double> z, double scale,
                     nn::ParamVector* grad);

// (R(z,a) - r_e)^2; regresses the extrinsic reward only.
StepLoss reward_loss(const ToldModel& model, const nn::ParamVector& params,
                     std::span<const double> z, std::span<const double> action,
                     double r_e, double scale, nn::ParamVector* grad);

// ||d(z,a) - h_target(o_next)||^2; the target embedding is a constant.
StepLoss consistency_loss(const ToldModel& model, const nn::ParamVector& params,
                          const nn::ParamVector& stop_params,
                          std::span<const double> z,
                          std::span<const double> action,
                          std::span<const double> next_observation, double scale,
                          nn::ParamVector* grad);

// Per-component lambda-weighted sums of the raw per-step values.
// total = c1 * q + c2 * reward + c3 * consistency + policy.
struct ToldLosses {
  double total = 0.0;
  double q = 0.0;
  double reward = 0.0;
  double consistency = 0.0;
  double policy = 0.0;
};

// The K-step model objective over a recurrent latent rollout: z_0 = h(o_0),
// z_{j+1} = d(z_j, a_j). TD bootstrap latents are target-encoded true next
// observations (from stop_params). `intrinsic` holds r_i per step, already
// computed by the curiosity module. Gradients (scaled by grad_scale) are
// accumulated into `grad` when non-null, including the reverse chain through
// the rollout into the encoder. Throws NonFiniteError (with the step index)
// if any per-step value is non-finite.
ToldLosses told_objective(const ToldModel& model, const nn::ParamVector& params,
                          const nn::ParamVector& stop_params,
                          const Trajectory& trajectory,
                          std::span<const double> intrinsic,
                          const LossWeights& weights, nn::ParamVector* grad,
                          double grad_scale = 1.0);

}  // namespace ccem::told

#endif  // CCEM_TOLD_LOSSES_HPP_
