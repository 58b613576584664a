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

#ifndef CCEM_TOLD_MODEL_HPP_
#define CCEM_TOLD_MODEL_HPP_

#include <span>
#include <string>
#include <vector>

#include "ccem/nn/mlp.hpp"
#include "ccem/nn/param_vector.hpp"
#include "ccem/nn/rng.hpp"

namespace ccem::told {

struct ToldConfig {
  int obs_dim = 0;
  int latent_dim = 0;
  int action_dim = 0;
  int encoder_hidden = 256;
  int encoder_layers = 2;
  int head_hidden = 256;
  int head_layers = 2;
  bool twin_q = false;  // second Q head trained on the same target, min at read
  nn::Activation activation = nn::Activation::kElu;

  void validate() const;
};

// Task-oriented latent dynamics model: encoder, latent dynamics, reward head,
// Q head(s) and policy head, plus EMA target copies of the encoder and Q.
// All parameters live in a shared ParamVector; this class is stateless apart
// from the architecture, so concurrent reads against one parameter snapshot
// are safe.
class ToldModel {
 public:
  explicit ToldModel(const ToldConfig& config);

  void declare(nn::ParamLayout& layout);
  void bind(const nn::ParamLayout& layout);
  // Initializes online segments and copies them into the target segments.
  void init_params(nn::ParamVector& params, nn::Rng& rng) const;

  const ToldConfig& config() const { return config_; }
  int num_q_heads() const { return config_.twin_q ? 2 : 1; }

  // z = h(o)
  std::vector<double> encode(const nn::ParamVector& params,
                             std::span<const double> observation,
                             nn::MlpCache* cache = nullptr) const;
  // z_bar = h_target(o); never receives gradient
  std::vector<double> encode_target(const nn::ParamVector& params,
                                    std::span<const double> observation) const;
  // z' = d(z, a)
  std::vector<double> dynamics_step(const nn::ParamVector& params,
                                    std::span<const double> z,
                                    std::span<const double> action,
                                    nn::MlpCache* cache = nullptr) const;
  double predict_reward(const nn::ParamVector& params, std::span<const double> z,
                        std::span<const double> action,
                        nn::MlpCache* cache = nullptr) const;
  // Q(z, a); with twin heads this is the min of the two. `head` selects one
  // head explicitly (-1 = min over heads).
  double predict_q(const nn::ParamVector& params, std::span<const double> z,
                   std::span<const double> action, bool use_target,
                   int head = -1, nn::MlpCache* cache = nullptr) const;
  // a = tanh(mlp(z)), then optional Gaussian noise, then clamp to [-1, 1].
  // `pre_tanh` receives the raw head output when non-null (for backward).
  std::vector<double> policy_action(const nn::ParamVector& params,
                                    std::span<const double> z, double noise_std,
                                    nn::Rng* rng = nullptr,
                                    nn::MlpCache* cache = nullptr,
                                    std::vector<double>* pre_tanh = nullptr) const;

  // theta_bar <- (1 - zeta) theta_bar + zeta theta for the selected targets.
  void ema_encoder_target(nn::ParamVector& params, double zeta) const;
  void ema_q_target(nn::ParamVector& params, double zeta) const;

  // Segment name groups, used for optimizer scoping and stop-grad checks.
  std::vector<std::string> online_segments() const;   // theta (all five heads)
  std::vector<std::string> target_segments() const;   // theta_bar
  std::vector<std::string> encoder_segments() const;  // theta_h
  std::vector<std::string> policy_segments() const;   // theta_pi

  const nn::Mlp& encoder_net() const { return encoder_; }
  const nn::Mlp& target_encoder_net() const { return target_encoder_; }
  const nn::Mlp& dynamics_net() const { return dynamics_; }
  const nn::Mlp& reward_net() const { return reward_; }
  const nn::Mlp& q_net(int head) const { return head == 1 ? q2_ : q_; }
  const nn::Mlp& target_q_net(int head) const { return head == 1 ? target_q2_ : target_q_; }
  const nn::Mlp& policy_net() const { return policy_; }

 private:
  ToldConfig config_;
  nn::Mlp encoder_, target_encoder_;
  nn::Mlp dynamics_;
  nn::Mlp reward_;
  nn::Mlp q_, q2_, target_q_, target_q2_;
  nn::Mlp policy_;
};

// concat(z, a) helper shared with the loss code.
std::vector<double> concat(std::span<const double> a, std::span<const double> b);

}  // namespace ccem::told

#endif  // CCEM_TOLD_MODEL_HPP_
