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

#include "ccem/told/model.hpp"

#include <algorithm>
#include <cmath>

#include "ccem/error.hpp"
#include "ccem/nn/adam.hpp"

namespace ccem::told {

using nn::Mlp;
using nn::MlpSpec;

void ToldConfig::validate() const {
  if (obs_dim < 1) throw DimensionError("ToldConfig: obs_dim < 1");
  if (latent_dim < 1) throw DimensionError("ToldConfig: latent_dim < 1");
  if (action_dim < 1) throw DimensionError("ToldConfig: action_dim < 1");
  if (encoder_hidden < 1 || head_hidden < 1) {
    throw DimensionError("ToldConfig: hidden dims < 1");
  }
  if (encoder_layers < 0 || head_layers < 0) {
    throw DimensionError("ToldConfig: layer counts must be >= 0");
  }
}

namespace {

MlpSpec make_spec(int in, int hidden, int layers, int out, nn::Activation act) {
  MlpSpec spec;
  spec.input_dim = in;
  spec.hidden_dims.assign(static_cast<std::size_t>(layers), hidden);
  spec.output_dim = out;
  spec.activation = act;
  return spec;
}

}  // namespace

ToldModel::ToldModel(const ToldConfig& config) : config_(config) {
  config_.validate();
  const int dz = config_.latent_dim;
  const int da = config_.action_dim;
  const auto act = config_.activation;
  encoder_ = Mlp("encoder", make_spec(config_.obs_dim, config_.encoder_hidden,
                                      config_.encoder_layers, dz, act));
  target_encoder_ = Mlp("target_encoder", encoder_.spec());
  dynamics_ = Mlp("dynamics", make_spec(dz + da, config_.head_hidden,
                                        config_.head_layers, dz, act));
  reward_ = Mlp("reward", make_spec(dz + da, config_.head_hidden,
                                    config_.head_layers, 1, act));
  q_ = Mlp("q", make_spec(dz + da, config_.head_hidden, config_.head_layers, 1, act));
  target_q_ = Mlp("target_q", q_.spec());
  if (config_.twin_q) {
    q2_ = Mlp("q2", q_.spec());
    target_q2_ = Mlp("target_q2", q_.spec());
  }
  policy_ = Mlp("policy", make_spec(dz, config_.head_hidden, config_.head_layers,
                                    da, act));
}

void ToldModel::declare(nn::ParamLayout& layout) {
  encoder_.declare(layout);
  dynamics_.declare(layout);
  reward_.declare(layout);
  q_.declare(layout);
  if (config_.twin_q) q2_.declare(layout);
  policy_.declare(layout);
  target_encoder_.declare(layout);
  target_q_.declare(layout);
  if (config_.twin_q) target_q2_.declare(layout);
}

void ToldModel::bind(const nn::ParamLayout& layout) {
  encoder_.bind(layout);
  dynamics_.bind(layout);
  reward_.bind(layout);
  q_.bind(layout);
  if (config_.twin_q) q2_.bind(layout);
  policy_.bind(layout);
  target_encoder_.bind(layout);
  target_q_.bind(layout);
  if (config_.twin_q) target_q2_.bind(layout);
}

namespace {

void copy_net_segments(nn::ParamVector& params, const Mlp& from, const Mlp& to) {
  for (int l = 0; l < from.spec().num_layers(); ++l) {
    auto src_w = params.seg(from.prefix() + "/w" + std::to_string(l));
    auto dst_w = params.seg(to.prefix() + "/w" + std::to_string(l));
    std::copy(src_w.begin(), src_w.end(), dst_w.begin());
    auto src_b = params.seg(from.prefix() + "/b" + std::to_string(l));
    auto dst_b = params.seg(to.prefix() + "/b" + std::to_string(l));
    std::copy(src_b.begin(), src_b.end(), dst_b.begin());
  }
}

void ema_net_segments(nn::ParamVector& params, const Mlp& online, const Mlp& target,
                      double zeta) {
  for (int l = 0; l < online.spec().num_layers(); ++l) {
    nn::ema_update(params.seg(target.prefix() + "/w" + std::to_string(l)),
                   params.seg(online.prefix() + "/w" + std::to_string(l)), zeta);
    nn::ema_update(params.seg(target.prefix() + "/b" + std::to_string(l)),
                   params.seg(online.prefix() + "/b" + std::to_string(l)), zeta);
  }
}

void append_net_segments(const Mlp& net, std::vector<std::string>& out) {
  for (int l = 0; l < net.spec().num_layers(); ++l) {
    out.push_back(net.prefix() + "/w" + std::to_string(l));
    out.push_back(net.prefix() + "/b" + std::to_string(l));
  }
}

}  // namespace

void ToldModel::init_params(nn::ParamVector& params, nn::Rng& rng) const {
  encoder_.init_params(params, rng);
  dynamics_.init_params(params, rng);
  reward_.init_params(params, rng);
  q_.init_params(params, rng);
  if (config_.twin_q) q2_.init_params(params, rng);
  policy_.init_params(params, rng);
  copy_net_segments(params, encoder_, target_encoder_);
  copy_net_segments(params, q_, target_q_);
  if (config_.twin_q) copy_net_segments(params, q2_, target_q2_);
}

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<double> ToldModel::encode(const nn::ParamVector& params,
                                      std::span<const double> observation,
                                      nn::MlpCache* cache) const {
  return encoder_.forward(params, observation, cache);
}

std::vector<double> ToldModel::encode_target(const nn::ParamVector& params,
                                             std::span<const double> observation) const {
  return target_encoder_.forward(params, observation);
}

std::vector<double> ToldModel::dynamics_step(const nn::ParamVector& params,
                                             std::span<const double> z,
                                             std::span<const double> action,
                                             nn::MlpCache* cache) const {
  return dynamics_.forward(params, concat(z, action), cache);
}

double ToldModel::predict_reward(const nn::ParamVector& params,
                                 std::span<const double> z,
                                 std::span<const double> action,
                                 nn::MlpCache* cache) const {
  return reward_.forward(params, concat(z, action), cache)[0];
}

double ToldModel::predict_q(const nn::ParamVector& params, std::span<const double> z,
                            std::span<const double> action, bool use_target,
                            int head, nn::MlpCache* cache) const {
  const auto za = concat(z, action);
  auto eval = [&](const Mlp& net, nn::MlpCache* c) {
    return net.forward(params, za, c)[0];
  };
  if (head >= 0) {
    const Mlp& net = use_target ? target_q_net(head) : q_net(head);
    return eval(net, cache);
  }
  double q0 = eval(use_target ? target_q_ : q_, cache);
  if (!config_.twin_q) return q0;
  double q1 = eval(use_target ? target_q2_ : q2_, nullptr);
  return std::min(q0, q1);
}

std::vector<double> ToldModel::policy_action(const nn::ParamVector& params,
                                             std::span<const double> z,
                                             double noise_std, nn::Rng* rng,
                                             nn::MlpCache* cache,
                                             std::vector<double>* pre_tanh) const {
  if (noise_std < 0.0) throw Error("policy_action: noise_std must be >= 0");
  std::vector<double> raw = policy_.forward(params, z, cache);
  std::vector<double> action(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) action[i] = std::tanh(raw[i]);
  if (pre_tanh != nullptr) *pre_tanh = std::move(raw);
  if (noise_std > 0.0) {
    if (rng == nullptr) throw Error("policy_action: noise requested without rng");
    std::normal_distribution<double> noise(0.0, noise_std);
    for (double& a : action) a += noise(*rng);
  }
  for (double& a : action) a = std::clamp(a, -1.0, 1.0);
  return action;
}

void ToldModel::ema_encoder_target(nn::ParamVector& params, double zeta) const {
  ema_net_segments(params, encoder_, target_encoder_, zeta);
}

void ToldModel::ema_q_target(nn::ParamVector& params, double zeta) const {
  ema_net_segments(params, q_, target_q_, zeta);
  if (config_.twin_q) ema_net_segments(params, q2_, target_q2_, zeta);
}

std::vector<std::string> ToldModel::online_segments() const {
  std::vector<std::string> out;
  append_net_segments(encoder_, out);
  append_net_segments(dynamics_, out);
  append_net_segments(reward_, out);
  append_net_segments(q_, out);
  if (config_.twin_q) append_net_segments(q2_, out);
  append_net_segments(policy_, out);
  return out;
}

std::vector<std::string> ToldModel::target_segments() const {
  std::vector<std::string> out;
  append_net_segments(target_encoder_, out);
  append_net_segments(target_q_, out);
  if (config_.twin_q) append_net_segments(target_q2_, out);
  return out;
}

std::vector<std::string> ToldModel::encoder_segments() const {
  std::vector<std::string> out;
  append_net_segments(encoder_, out);
  return out;
}

std::vector<std::string> ToldModel::policy_segments() const {
  std::vector<std::string> out;
  append_net_segments(policy_, out);
  return out;
}

}  // namespace ccem::told
