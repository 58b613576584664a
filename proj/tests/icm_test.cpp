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

#include <cmath>
#include <string>
#include <vector>

#include "ccem/checks.hpp"
#include "ccem/curiosity/icm.hpp"
#include "ccem/error.hpp"
#include "ccem/nn/rng.hpp"
#include "doctest.h"

namespace {

using namespace ccem;

bool segment_group_zero(const nn::ParamVector& grad, const std::string& prefix) {
  for (const auto& seg : grad.layout().segments()) {
    if (seg.name.rfind(prefix, 0) != 0) continue;
    for (double g : grad.seg(seg.name)) {
      if (g != 0.0) return false;
    }
  }
  return true;
}

bool segment_group_nonzero(const nn::ParamVector& grad, const std::string& prefix) {
  bool any = false;
  for (const auto& seg : grad.layout().segments()) {
    if (seg.name.rfind(prefix, 0) != 0) continue;
    for (double g : grad.seg(seg.name)) any = any || g != 0.0;
  }
  return any;
}

}  // namespace

TEST_CASE("inverse loss closed forms with a bias-only inverse model") {
  checks::Rig rig = checks::make_rig(0);
  rig.params.zero();
  const int da = rig.model->config().action_dim;
  const int dobs = rig.model->config().obs_dim;
  std::vector<double> o_t(static_cast<std::size_t>(dobs), 0.2);
  std::vector<double> o_next(static_cast<std::size_t>(dobs), -0.1);
  std::vector<double> action(static_cast<std::size_t>(da));
  for (int i = 0; i < da; ++i) action[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1.0 : -1.0;

  // Zero everything: the predicted action is the inverse model's output bias.
  double miss = rig.icm->inverse_loss(*rig.model, rig.params, o_t, o_next, action,
                                      1.0, nullptr);
  CHECK(miss == doctest::Approx(static_cast<double>(da)).epsilon(1e-15));

  auto bias = rig.params.seg("inverse/b1");
  for (int i = 0; i < da; ++i) bias[static_cast<std::size_t>(i)] = action[static_cast<std::size_t>(i)];
  double hit = rig.icm->inverse_loss(*rig.model, rig.params, o_t, o_next, action,
                                     1.0, nullptr);
  CHECK(hit == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("inverse loss gradient reaches only the inverse model and encoder") {
  checks::Rig rig = checks::make_rig(1);
  const int da = rig.model->config().action_dim;
  const int dobs = rig.model->config().obs_dim;
  nn::Rng rng = nn::make_rng(5, 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> o_t(static_cast<std::size_t>(dobs)), o_next(static_cast<std::size_t>(dobs));
  std::vector<double> action(static_cast<std::size_t>(da));
  for (double& v : o_t) v = u(rng);
  for (double& v : o_next) v = u(rng);
  for (double& v : action) v = u(rng);

  nn::ParamVector grad(rig.layout);
  rig.icm->inverse_loss(*rig.model, rig.params, o_t, o_next, action, 1.0, &grad);
  CHECK(segment_group_nonzero(grad, "inverse/"));
  CHECK(segment_group_nonzero(grad, "encoder/"));
  CHECK(segment_group_zero(grad, "dynamics/"));
  CHECK(segment_group_zero(grad, "reward/"));
  CHECK(segment_group_zero(grad, "q/"));
  CHECK(segment_group_zero(grad, "policy/"));
  CHECK(segment_group_zero(grad, "action_encoder/"));
  CHECK(segment_group_zero(grad, "contrastive/"));
  CHECK(segment_group_zero(grad, "target_"));
}

TEST_CASE("contrastive loss gradient reaches encoder, action encoder and W") {
  checks::Rig rig = checks::make_rig(2);
  const int da = rig.model->config().action_dim;
  const int dobs = rig.model->config().obs_dim;
  nn::Rng rng = nn::make_rng(6, 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int batch = 5;
  std::vector<std::vector<double>> obs, actions, next_obs;
  for (int n = 0; n < batch; ++n) {
    std::vector<double> o(static_cast<std::size_t>(dobs)), a(static_cast<std::size_t>(da)), o2(static_cast<std::size_t>(dobs));
    for (double& v : o) v = u(rng);
    for (double& v : a) v = u(rng);
    for (double& v : o2) v = u(rng);
    obs.push_back(o);
    actions.push_back(a);
    next_obs.push_back(o2);
  }

  nn::ParamVector grad(rig.layout);
  const double loss = rig.icm->temporal_contrastive_loss(
      *rig.model, rig.params, rig.params, obs, actions, next_obs, 1.0, &grad);
  CHECK(loss > 0.0);
  CHECK(segment_group_nonzero(grad, "encoder/"));
  CHECK(segment_group_nonzero(grad, "action_encoder/"));
  CHECK(segment_group_nonzero(grad, "contrastive/"));
  CHECK(segment_group_zero(grad, "inverse/"));
  CHECK(segment_group_zero(grad, "dynamics/"));
  CHECK(segment_group_zero(grad, "q/"));
  CHECK(segment_group_zero(grad, "policy/"));
  CHECK(segment_group_zero(grad, "target_"));

  CHECK_THROWS_AS(rig.icm->temporal_contrastive_loss(
                      *rig.model, rig.params, rig.params,
                      std::vector<std::vector<double>>{obs[0]},
                      std::vector<std::vector<double>>{actions[0]},
                      std::vector<std::vector<double>>{next_obs[0]}, 1.0, nullptr),
                  Error);
}

TEST_CASE("action encoding is layer normalized") {
  checks::Rig rig = checks::make_rig(3);
  const int da = rig.model->config().action_dim;
  std::vector<double> action(static_cast<std::size_t>(da), 0.4);
  std::vector<double> u = rig.icm->encode_action(rig.params, action);
  REQUIRE(static_cast<int>(u.size()) == rig.icm->config().action_latent_dim);
  double mean = 0.0;
  for (double v : u) mean += v;
  mean /= static_cast<double>(u.size());
  double var = 0.0;
  for (double v : u) var += (v - mean) * (v - mean);
  var /= static_cast<double>(u.size());
  CHECK(std::abs(mean) < 1e-12);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("intrinsic reward law hand cases") {
  checks::Rig rig = checks::make_rig(4);
  rig.params.zero();  // dynamics predict the origin
  const int dz = rig.model->config().latent_dim;
  const int da = rig.model->config().action_dim;
  const std::vector<double> z(static_cast<std::size_t>(dz), 0.0);
  const std::vector<double> a(static_cast<std::size_t>(da), 0.0);
  std::vector<double> z_next(static_cast<std::size_t>(dz), 0.0);
  z_next[0] = 1.0;
  z_next[1] = 1.0;  // squared error 2

  curiosity::IntrinsicConfig cfg;
  cfg.C = 0.2;
  cfg.alpha = 0.0;
  // The raw error 2 lifts r_i_max from 1 to 2 before the ratio is taken:
  // r = 0.2 * 1 * 2 * (1 / 2).
  double r = curiosity::intrinsic_reward(*rig.model, rig.params, cfg, z, a, z_next, 0);
  CHECK(r == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(cfg.r_i_max == doctest::Approx(2.0).epsilon(1e-15));

  // Stationary on repeat: the max is already 2.
  double r2 = curiosity::intrinsic_reward(*rig.model, rig.params, cfg, z, a, z_next, 0);
  CHECK(r2 == doctest::Approx(0.2).epsilon(1e-15));

  // One 1/alpha window of decay scales by exactly 1/e.
  cfg.alpha = 1e-5;
  double r3 = curiosity::intrinsic_reward(*rig.model, rig.params, cfg, z, a, z_next,
                                          100000);
  CHECK(r3 == doctest::Approx(0.2 / std::exp(1.0)).epsilon(1e-12));

  // Exact prediction scores zero.
  std::vector<double> origin(static_cast<std::size_t>(dz), 0.0);
  double r4 = curiosity::intrinsic_reward(*rig.model, rig.params, cfg, z, a, origin, 0);
  CHECK(r4 == 0.0);
}

TEST_CASE("extrinsic normalizer tracks the absolute maximum") {
  curiosity::IntrinsicConfig cfg;
  CHECK(cfg.r_e_max == 1.0);
  cfg.observe_extrinsic(0.5);
  CHECK(cfg.r_e_max == 1.0);  // starts at 1, only grows
  cfg.observe_extrinsic(-3.0);
  CHECK(cfg.r_e_max == 3.0);
  cfg.observe_extrinsic(2.0);
  CHECK(cfg.r_e_max == 3.0);
}

TEST_CASE("infonce from logits closed forms") {
  // Diagonal-dominant 2x2: both rows give -log(e^2 / (e^2 + 1)).
  std::vector<std::vector<double>> logits = {{2.0, 0.0}, {0.0, 2.0}};
  std::vector<std::vector<double>> dlogits;
  const double loss = curiosity::infonce_from_logits(logits, &dlogits);
  CHECK(loss == doctest::Approx(std::log(1.0 + std::exp(-2.0))).epsilon(1e-14));

  // Gradient rows sum to zero (softmax minus one-hot, divided by batch).
  REQUIRE(dlogits.size() == 2);
  for (const auto& row : dlogits) {
    double sum = 0.0;
    for (double v : row) sum += v;
    CHECK(sum == doctest::Approx(0.0).epsilon(1e-14));
  }
  CHECK(dlogits[0][0] < 0.0);  // pulls the positive logit up
  CHECK(dlogits[0][1] > 0.0);  // pushes the negative down

  // Uniform logits reduce to ln N.
  std::vector<std::vector<double>> uniform(3, std::vector<double>(3, 0.7));
  CHECK(curiosity::infonce_from_logits(uniform, nullptr) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-14));

  std::vector<std::vector<double>> tiny = {{1.0}};
  CHECK_THROWS_AS(curiosity::infonce_from_logits(tiny, nullptr), Error);
}

TEST_CASE("icm config validation") {
  curiosity::IcmConfig bad;
  bad.latent_dim = 0;
  bad.action_dim = 2;
  CHECK_THROWS_AS(bad.validate(), DimensionError);

  curiosity::IntrinsicConfig neg;
  neg.C = -0.1;
  CHECK_THROWS_AS(neg.validate(), ConfigError);
}
