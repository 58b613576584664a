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

#ifndef CCEM_CURIOSITY_ICM_HPP_
#define CCEM_CURIOSITY_ICM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ccem/nn/mlp.hpp"
#include "ccem/nn/param_vector.hpp"
#include "ccem/told/model.hpp"

namespace ccem::curiosity {

struct IcmConfig {
  int latent_dim = 0;         // d_z, must match the world model
  int action_dim = 0;         // d_a
  int action_latent_dim = 16; // d_u
  int inverse_hidden = 512;
  int inverse_layers = 2;
  int action_hidden = 512;
  int action_layers = 1;
  nn::Activation activation = nn::Activation::kElu;

  void validate() const;
};

// Intrinsic curiosity module: inverse dynamics model I(z_t, z_{t+1}) -> a_t,
// action encoder g(a) -> u with layer-normalized output, and the bilinear
// contrastive transformation W of shape (d_z + d_u) x d_z. Parameters live in
// the shared ParamVector under "inverse/...", "action_encoder/..." and
// "contrastive/W".
class Icm {
 public:
  explicit Icm(const IcmConfig& config);

  void declare(nn::ParamLayout& layout);
  void bind(const nn::ParamLayout& layout);
  void init_params(nn::ParamVector& params, nn::Rng& rng) const;

  const IcmConfig& config() const { return config_; }

  std::vector<double> encode_action(const nn::ParamVector& params,
                                    std::span<const double> action,
                                    nn::MlpCache* cache = nullptr) const;

  // ||I(h(o_t), h(o_next)) - action||^2 with both observations through the
  // online encoder. Accumulates scale * gradients into `grad` (inverse model
  // and online encoder segments only).
  double inverse_loss(const told::ToldModel& told, const nn::ParamVector& params,
                      std::span<const double> o_t, std::span<const double> o_next,
                      std::span<const double> action, double scale,
                      nn::ParamVector* grad) const;

  // InfoNCE over a batch: query [h(o_n); g(a_n)], key h_target(o_next_m)
  // (from stop_params, no gradient), similarity q^T W k, negatives are the
  // other in-batch keys. Returns the batch mean of -log softmax(positive).
  // Gradients reach the online encoder, the action encoder and W.
  // Throws on batch size < 2.
  double temporal_contrastive_loss(const told::ToldModel& told,
                                   const nn::ParamVector& params,
                                   const nn::ParamVector& stop_params,
                                   std::span<const std::vector<double>> obs,
                                   std::span<const std::vector<double>> actions,
                                   std::span<const std::vector<double>> next_obs,
                                   double scale, nn::ParamVector* grad) const;

  // Segment groups for optimizer scoping. The encoder segments they train
  // jointly with come from ToldModel::encoder_segments().
  std::vector<std::string> inverse_segments() const;
  std::vector<std::string> contrastive_segments() const;  // action encoder + W

  const nn::Mlp& inverse_net() const { return inverse_; }
  const nn::Mlp& action_encoder_net() const { return action_encoder_; }

 private:
  IcmConfig config_;
  nn::Mlp inverse_;
  nn::Mlp action_encoder_;
  int w_id_ = -1;
  bool bound_ = false;
};

// Running state of the intrinsic reward law: weight C, decay alpha, and the
// running maxima used for normalization. The maxima start at 1 so the ratio
// is defined before anything has been observed.
struct IntrinsicConfig {
  double C = 0.2;
  double alpha = 1e-5;
  double r_e_max = 1.0;
  double r_i_max = 1.0;

  void validate() const;
  // Tracks the largest absolute extrinsic reward seen so far.
  void observe_extrinsic(double r_e);
};

// r_i = C * exp(-alpha * env_step) * ||d(z, a) - z_next||^2 * r_e_max/r_i_max.
// The raw squared error updates cfg.r_i_max before the ratio is taken, so the
// normalized term never exceeds C * r_e_max * exp(-alpha * env_step).
double intrinsic_reward(const told::ToldModel& told, const nn::ParamVector& params,
                        IntrinsicConfig& cfg, std::span<const double> z,
                        std::span<const double> action,
                        std::span<const double> z_next, std::int64_t env_step);

// Batch-mean InfoNCE where row n's positive is column n. Fills `dlogits`
// (same shape) with d loss / d logits when non-null.
double infonce_from_logits(const std::vector<std::vector<double>>& logits,
                           std::vector<std::vector<double>>* dlogits);

}  // namespace ccem::curiosity

#endif  // CCEM_CURIOSITY_ICM_HPP_
