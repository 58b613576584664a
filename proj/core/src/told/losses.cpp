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

#include "ccem/told/losses.hpp"

#include <cmath>
#include <string>

#include "ccem/error.hpp"

namespace ccem::told {

void LossWeights::validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ConfigError("LossWeights: lambda must be in (0, 1]");
  }
  if (c1 < 0.0 || c2 < 0.0 || c3 < 0.0) {
    throw ConfigError("LossWeights: loss coefficients must be >= 0");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ConfigError("LossWeights: gamma must be in [0, 1)");
  }
}

void Trajectory::validate(int obs_dim, int action_dim) const {
  const std::size_t k = actions.size();
  if (k == 0) throw DimensionError("Trajectory: needs at least one step");
  if (observations.size() != k + 1) {
    throw DimensionError("Trajectory: expected " + std::to_string(k + 1) +
                         " observations, got " + std::to_string(observations.size()));
  }
  if (rewards.size() != k) {
    throw DimensionError("Trajectory: expected " + std::to_string(k) +
                         " rewards, got " + std::to_string(rewards.size()));
  }
  for (const auto& o : observations) {
    if (static_cast<int>(o.size()) != obs_dim) {
      throw DimensionError("Trajectory: observation dim " + std::to_string(o.size()) +
                           " != " + std::to_string(obs_dim));
    }
  }
  for (const auto& a : actions) {
    if (static_cast<int>(a.size()) != action_dim) {
      throw DimensionError("Trajectory: action dim " + std::to_string(a.size()) +
                           " != " + std::to_string(action_dim));
    }
  }
}

StepLoss q_loss(const ToldModel& model, const nn::ParamVector& params,
                const nn::ParamVector& stop_params, std::span<const double> z,
                std::span<const double> action, double r_e, double r_i,
                std::span<const double> z_next, double gamma, double scale,
                nn::ParamVector* grad) {
  const auto bootstrap_action = model.policy_action(stop_params, z_next, 0.0);
  const double q_next =
      model.predict_q(stop_params, z_next, bootstrap_action, /*use_target=*/true);
  const double target = r_e + r_i + gamma * q_next;
  if (!std::isfinite(target)) {
    throw NonFiniteError("q_loss: non-finite TD target");
  }

  StepLoss out;
  out.dz.assign(z.size(), 0.0);
  std::vector<double> x_grad(z.size() + action.size(), 0.0);
  for (int head = 0; head < model.num_q_heads(); ++head) {
    nn::MlpCache cache;
    const double q = model.predict_q(params, z, action, /*use_target=*/false,
                                     head, &cache);
    const double diff = q - target;
    out.value += diff * diff;
    const double dq[1] = {2.0 * diff};
    model.q_net(head).backward(params, cache, dq, scale, grad, x_grad);
  }
  for (std::size_t i = 0; i < z.size(); ++i) out.dz[i] = x_grad[i];
  return out;
}

StepLoss policy_loss(const ToldModel& model, const nn::ParamVector& params,
                     const nn::ParamVector& stop_params,
                     std::span<const double> z, double scale,
                     nn::ParamVector* grad) {
  nn::MlpCache policy_cache;
  std::vector<double> pre_tanh;
  const auto action = model.policy_action(params, z, 0.0, nullptr, &policy_cache,
                                          &pre_tanh);

  // With twin heads, evaluate both and differentiate through the smaller.
  int head = 0;
  nn::MlpCache q_cache;
  double q = model.predict_q(stop_params, z, action, /*use_target=*/false, 0,
                             &q_cache);
  if (model.num_q_heads() > 1) {
    nn::MlpCache q2_cache;
    const double q2 = model.predict_q(stop_params, z, action,
                                      /*use_target=*/false, 1, &q2_cache);
    if (q2 < q) {
      q = q2;
      head = 1;
      q_cache = std::move(q2_cache);
    }
  }

  StepLoss out;
  out.value = -q;
  out.dz.assign(z.size(), 0.0);
  if (grad != nullptr) {
    // d(-q)/da through the frozen critic, then through tanh into the policy.
    std::vector<double> x_grad(z.size() + action.size(), 0.0);
    const double dq[1] = {-1.0};
    model.q_net(head).backward(stop_params, q_cache, dq, scale, nullptr, x_grad);
    std::vector<double> d_raw(action.size());
    for (std::size_t i = 0; i < action.size(); ++i) {
      const double t = std::tanh(pre_tanh[i]);
      d_raw[i] = x_grad[z.size() + i] * (1.0 - t * t);
    }
    model.policy_net().backward(params, policy_cache, d_raw, 1.0, grad, {});
  }
  return out;
}

StepLoss reward_loss(const ToldModel& model, const nn::ParamVector& params,
                     std::span<const double> z, std::span<const double> action,
                     double r_e, double scale, nn::ParamVector* grad) {
  nn::MlpCache cache;
  const double pred = model.predict_reward(params, z, action, &cache);
  const double diff = pred - r_e;

  StepLoss out;
  out.value = diff * diff;
  out.dz.assign(z.size(), 0.0);
  std::vector<double> x_grad(z.size() + action.size(), 0.0);
  const double dr[1] = {2.0 * diff};
  model.reward_net().backward(params, cache, dr, scale, grad, x_grad);
  for (std::size_t i = 0; i < z.size(); ++i) out.dz[i] = x_grad[i];
  return out;
}

StepLoss consistency_loss(const ToldModel& model, const nn::ParamVector& params,
                          const nn::ParamVector& stop_params,
                          std::span<const double> z,
                          std::span<const double> action,
                          std::span<const double> next_observation, double scale,
                          nn::ParamVector* grad) {
  nn::MlpCache cache;
  const auto pred = model.dynamics_step(params, z, action, &cache);
  const auto target = model.encode_target(stop_params, next_observation);

  StepLoss out;
  out.dz.assign(z.size(), 0.0);
  std::vector<double> d_pred(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - target[i];
    out.value += diff * diff;
    d_pred[i] = 2.0 * diff;
  }
  std::vector<double> x_grad(z.size() + action.size(), 0.0);
  model.dynamics_net().backward(params, cache, d_pred, scale, grad, x_grad);
  for (std::size_t i = 0; i < z.size(); ++i) out.dz[i] = x_grad[i];
  return out;
}

ToldLosses told_objective(const ToldModel& model, const nn::ParamVector& params,
                          const nn::ParamVector& stop_params,
                          const Trajectory& trajectory,
                          std::span<const double> intrinsic,
                          const LossWeights& weights, nn::ParamVector* grad,
                          double grad_scale) {
  weights.validate();
  const auto& cfg = model.config();
  trajectory.validate(cfg.obs_dim, cfg.action_dim);
  const int steps = trajectory.steps();
  if (static_cast<int>(intrinsic.size()) != steps) {
    throw DimensionError("told_objective: expected " + std::to_string(steps) +
                         " intrinsic rewards, got " + std::to_string(intrinsic.size()));
  }

  // Forward rollout through the online encoder and dynamics.
  nn::MlpCache encoder_cache;
  std::vector<std::vector<double>> latents(static_cast<std::size_t>(steps));
  std::vector<nn::MlpCache> dyn_caches(static_cast<std::size_t>(steps > 0 ? steps - 1 : 0));
  latents[0] = model.encode(params, trajectory.observations[0], &encoder_cache);
  for (int j = 0; j + 1 < steps; ++j) {
    latents[static_cast<std::size_t>(j + 1)] =
        model.dynamics_step(params, latents[static_cast<std::size_t>(j)],
                            trajectory.actions[static_cast<std::size_t>(j)],
                            &dyn_caches[static_cast<std::size_t>(j)]);
  }

  // The policy term is optimized with respect to the policy parameters only,
  // so it sees the rollout latents as constants. Recomputing them from
  // stop_params yields the same values during training (live == stop) while
  // keeping the cut visible to finite differences.
  std::vector<std::vector<double>> stop_latents(static_cast<std::size_t>(steps));
  stop_latents[0] = model.encode(stop_params, trajectory.observations[0]);
  for (int j = 0; j + 1 < steps; ++j) {
    stop_latents[static_cast<std::size_t>(j + 1)] =
        model.dynamics_step(stop_params, stop_latents[static_cast<std::size_t>(j)],
                            trajectory.actions[static_cast<std::size_t>(j)]);
  }

  ToldLosses losses;
  std::vector<std::vector<double>> dz_acc(
      static_cast<std::size_t>(steps),
      std::vector<double>(static_cast<std::size_t>(cfg.latent_dim), 0.0));

  double w = 1.0;
  for (int i = 0; i < steps; ++i) {
    const auto& z = latents[static_cast<std::size_t>(i)];
    const auto& a = trajectory.actions[static_cast<std::size_t>(i)];
    const auto& o_next = trajectory.observations[static_cast<std::size_t>(i + 1)];
    const double r_e = trajectory.rewards[static_cast<std::size_t>(i)];
    const double r_i = intrinsic[static_cast<std::size_t>(i)];
    const auto z_next = model.encode_target(stop_params, o_next);

    const auto q = q_loss(model, params, stop_params, z, a, r_e, r_i, z_next,
                          weights.gamma, grad_scale * w * weights.c1, grad);
    const auto r = reward_loss(model, params, z, a, r_e,
                               grad_scale * w * weights.c2, grad);
    const auto c = consistency_loss(model, params, stop_params, z, a, o_next,
                                    grad_scale * w * weights.c3, grad);
    const auto p = policy_loss(model, params, stop_params,
                               stop_latents[static_cast<std::size_t>(i)],
                               grad_scale * w, grad);

    const double step_total = weights.c1 * q.value + weights.c2 * r.value +
                              weights.c3 * c.value + p.value;
    if (!std::isfinite(step_total)) {
      throw NonFiniteError("told_objective: non-finite loss at step " +
                           std::to_string(i));
    }
    losses.q += w * q.value;
    losses.reward += w * r.value;
    losses.consistency += w * c.value;
    losses.policy += w * p.value;
    losses.total += w * step_total;

    auto& acc = dz_acc[static_cast<std::size_t>(i)];
    for (int d = 0; d < cfg.latent_dim; ++d) {
      acc[static_cast<std::size_t>(d)] += q.dz[static_cast<std::size_t>(d)] +
                                          r.dz[static_cast<std::size_t>(d)] +
                                          c.dz[static_cast<std::size_t>(d)];
    }
    w *= weights.lambda;
  }

  if (grad != nullptr) {
    // Reverse chain: push each step's latent gradient back through the
    // rollout dynamics, then through the encoder.
    std::vector<double> carry = std::move(dz_acc[static_cast<std::size_t>(steps - 1)]);
    for (int j = steps - 1; j >= 1; --j) {
      std::vector<double> x_grad(
          static_cast<std::size_t>(cfg.latent_dim + cfg.action_dim), 0.0);
      model.dynamics_net().backward(params, dyn_caches[static_cast<std::size_t>(j - 1)],
                                    carry, 1.0, grad, x_grad);
      carry = dz_acc[static_cast<std::size_t>(j - 1)];
      for (int d = 0; d < cfg.latent_dim; ++d) {
        carry[static_cast<std::size_t>(d)] += x_grad[static_cast<std::size_t>(d)];
      }
    }
    model.encoder_net().backward(params, encoder_cache, carry, 1.0, grad, {});
  }
  return losses;
}

}  // namespace ccem::told
