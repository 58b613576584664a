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

#include "ccem/curiosity/icm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ccem/error.hpp"

namespace ccem::curiosity {

namespace {

nn::MlpSpec make_spec(int in, int hidden, int layers, int out, nn::Activation act,
                      bool layernorm) {
  nn::MlpSpec spec;
  spec.input_dim = in;
  spec.hidden_dims.assign(static_cast<std::size_t>(layers), hidden);
  spec.output_dim = out;
  spec.activation = act;
  spec.output_layernorm = layernorm;
  return spec;
}

}  // namespace

void IcmConfig::validate() const {
  if (latent_dim < 1) throw DimensionError("IcmConfig: latent_dim < 1");
  if (action_dim < 1) throw DimensionError("IcmConfig: action_dim < 1");
  if (action_latent_dim < 2) {
    throw DimensionError("IcmConfig: action_latent_dim < 2 (layer norm needs >= 2)");
  }
  if (inverse_hidden < 1 || action_hidden < 1) {
    throw DimensionError("IcmConfig: hidden dims < 1");
  }
  if (inverse_layers < 0 || action_layers < 0) {
    throw DimensionError("IcmConfig: layer counts must be >= 0");
  }
}

Icm::Icm(const IcmConfig& config) : config_(config) {
  config_.validate();
  inverse_ = nn::Mlp("inverse",
                     make_spec(2 * config_.latent_dim, config_.inverse_hidden,
                               config_.inverse_layers, config_.action_dim,
                               config_.activation, false));
  action_encoder_ = nn::Mlp("action_encoder",
                            make_spec(config_.action_dim, config_.action_hidden,
                                      config_.action_layers,
                                      config_.action_latent_dim,
                                      config_.activation, true));
}

void Icm::declare(nn::ParamLayout& layout) {
  inverse_.declare(layout);
  action_encoder_.declare(layout);
  layout.add("contrastive/W", {config_.latent_dim + config_.action_latent_dim,
                               config_.latent_dim});
}

void Icm::bind(const nn::ParamLayout& layout) {
  inverse_.bind(layout);
  action_encoder_.bind(layout);
  w_id_ = layout.id("contrastive/W");
  bound_ = true;
}

void Icm::init_params(nn::ParamVector& params, nn::Rng& rng) const {
  inverse_.init_params(params, rng);
  action_encoder_.init_params(params, rng);
  const int fan_in = config_.latent_dim + config_.action_latent_dim;
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& w : params.seg(w_id_)) w = dist(rng);
}

std::vector<double> Icm::encode_action(const nn::ParamVector& params,
                                       std::span<const double> action,
                                       nn::MlpCache* cache) const {
  return action_encoder_.forward(params, action, cache);
}

double Icm::inverse_loss(const told::ToldModel& told, const nn::ParamVector& params,
                         std::span<const double> o_t, std::span<const double> o_next,
                         std::span<const double> action, double scale,
                         nn::ParamVector* grad) const {
  if (static_cast<int>(action.size()) != config_.action_dim) {
    throw DimensionError("inverse_loss: action dim mismatch");
  }
  nn::MlpCache enc_t, enc_next, inv_cache;
  const auto z_t = told.encode(params, o_t, &enc_t);
  const auto z_next = told.encode(params, o_next, &enc_next);
  const auto pred = inverse_.forward(params, told::concat(z_t, z_next), &inv_cache);

  double loss = 0.0;
  std::vector<double> d_pred(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - action[i];
    loss += diff * diff;
    d_pred[i] = 2.0 * diff;
  }
  if (grad != nullptr) {
    const std::size_t dz = static_cast<std::size_t>(config_.latent_dim);
    std::vector<double> x_grad(2 * dz, 0.0);
    inverse_.backward(params, inv_cache, d_pred, scale, grad, x_grad);
    told.encoder_net().backward(params, enc_t,
                                std::span<const double>(x_grad.data(), dz), 1.0,
                                grad, {});
    told.encoder_net().backward(params, enc_next,
                                std::span<const double>(x_grad.data() + dz, dz),
                                1.0, grad, {});
  }
  return loss;
}

double infonce_from_logits(const std::vector<std::vector<double>>& logits,
                           std::vector<std::vector<double>>* dlogits) {
  const std::size_t n = logits.size();
  if (n < 2) throw DimensionError("infonce_from_logits: needs at least 2 rows");
  for (const auto& row : logits) {
    if (row.size() != n) {
      throw DimensionError("infonce_from_logits: logits must be square");
    }
  }
  if (dlogits != nullptr) {
    dlogits->assign(n, std::vector<double>(n, 0.0));
  }

  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> probs(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = logits[r];
    const double m = *std::max_element(row.begin(), row.end());
    double denom = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      probs[c] = std::exp(row[c] - m);
      denom += probs[c];
    }
    loss += std::log(denom) - (row[r] - m);
    if (dlogits != nullptr) {
      auto& drow = (*dlogits)[r];
      for (std::size_t c = 0; c < n; ++c) {
        drow[c] = (probs[c] / denom - (c == r ? 1.0 : 0.0)) * inv_n;
      }
    }
  }
  return loss * inv_n;
}

double Icm::temporal_contrastive_loss(const told::ToldModel& told,
                                      const nn::ParamVector& params,
                                      const nn::ParamVector& stop_params,
                                      std::span<const std::vector<double>> obs,
                                      std::span<const std::vector<double>> actions,
                                      std::span<const std::vector<double>> next_obs,
                                      double scale, nn::ParamVector* grad) const {
  const std::size_t n = obs.size();
  if (n < 2) {
    throw DimensionError("temporal_contrastive_loss: batch size must be >= 2");
  }
  if (actions.size() != n || next_obs.size() != n) {
    throw DimensionError("temporal_contrastive_loss: batch arrays disagree");
  }
  const std::size_t dz = static_cast<std::size_t>(config_.latent_dim);
  const std::size_t du = static_cast<std::size_t>(config_.action_latent_dim);
  const std::size_t dq = dz + du;

  std::vector<nn::MlpCache> enc_caches(n), act_caches(n);
  std::vector<std::vector<double>> queries(n), keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = told.encode(params, obs[i], &enc_caches[i]);
    const auto u = encode_action(params, actions[i], &act_caches[i]);
    queries[i] = told::concat(z, u);
    keys[i] = told.encode_target(stop_params, next_obs[i]);
  }

  // wk[m] = W * k_m, so logit(n, m) = q_n . wk[m].
  const auto w = params.seg(w_id_);
  std::vector<std::vector<double>> wk(n, std::vector<double>(dq, 0.0));
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t r = 0; r < dq; ++r) {
      const double* row = w.data() + r * dz;
      double acc = 0.0;
      for (std::size_t c = 0; c < dz; ++c) acc += row[c] * keys[m][c];
      wk[m][r] = acc;
    }
  }
  std::vector<std::vector<double>> logits(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t m = 0; m < n; ++m) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dq; ++c) acc += queries[r][c] * wk[m][c];
      logits[r][m] = acc;
    }
  }

  std::vector<std::vector<double>> dlogits;
  const double loss = infonce_from_logits(logits, grad != nullptr ? &dlogits : nullptr);

  if (grad != nullptr) {
    auto gw = grad->seg(w_id_);
    std::vector<double> dq_vec(dq);
    for (std::size_t r = 0; r < n; ++r) {
      std::fill(dq_vec.begin(), dq_vec.end(), 0.0);
      for (std::size_t m = 0; m < n; ++m) {
        const double g = scale * dlogits[r][m];
        if (g == 0.0) continue;
        // d logit / d W = q_r outer k_m; d logit / d q_r = W k_m.
        for (std::size_t a = 0; a < dq; ++a) {
          dq_vec[a] += g * wk[m][a];
          double* grow = gw.data() + a * dz;
          const double gq = g * queries[r][a];
          for (std::size_t b = 0; b < dz; ++b) grow[b] += gq * keys[m][b];
        }
      }
      told.encoder_net().backward(params, enc_caches[r],
                                  std::span<const double>(dq_vec.data(), dz), 1.0,
                                  grad, {});
      action_encoder_.backward(params, act_caches[r],
                               std::span<const double>(dq_vec.data() + dz, du),
                               1.0, grad, {});
    }
  }
  return loss;
}

std::vector<std::string> Icm::inverse_segments() const {
  std::vector<std::string> out;
  for (int l = 0; l < inverse_.spec().num_layers(); ++l) {
    out.push_back("inverse/w" + std::to_string(l));
    out.push_back("inverse/b" + std::to_string(l));
  }
  return out;
}

std::vector<std::string> Icm::contrastive_segments() const {
  std::vector<std::string> out;
  for (int l = 0; l < action_encoder_.spec().num_layers(); ++l) {
    out.push_back("action_encoder/w" + std::to_string(l));
    out.push_back("action_encoder/b" + std::to_string(l));
  }
  out.push_back("contrastive/W");
  return out;
}

void IntrinsicConfig::validate() const {
  if (C < 0.0) throw ConfigError("IntrinsicConfig: C must be >= 0");
  if (alpha < 0.0) throw ConfigError("IntrinsicConfig: alpha must be >= 0");
  if (!(r_e_max > 0.0) || !(r_i_max > 0.0)) {
    throw ConfigError("IntrinsicConfig: running maxima must be > 0");
  }
}

void IntrinsicConfig::observe_extrinsic(double r_e) {
  r_e_max = std::max(r_e_max, std::abs(r_e));
}

double intrinsic_reward(const told::ToldModel& told, const nn::ParamVector& params,
                        IntrinsicConfig& cfg, std::span<const double> z,
                        std::span<const double> action,
                        std::span<const double> z_next, std::int64_t env_step) {
  cfg.validate();
  if (env_step < 0) throw Error("intrinsic_reward: env_step must be >= 0");
  const auto pred = told.dynamics_step(params, z, action);
  if (pred.size() != z_next.size()) {
    throw DimensionError("intrinsic_reward: latent dim mismatch");
  }
  double error = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - z_next[i];
    error += diff * diff;
  }
  cfg.r_i_max = std::max(cfg.r_i_max, error);
  const double decay = std::exp(-cfg.alpha * static_cast<double>(env_step));
  return cfg.C * decay * error * (cfg.r_e_max / cfg.r_i_max);
}

}  // namespace ccem::curiosity
