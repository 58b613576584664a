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
#include <vector>

#include "ccem/envs/env.hpp"
#include "ccem/error.hpp"
#include "ccem/nn/rng.hpp"
#include "doctest.h"

namespace {

using namespace ccem;

}  // namespace

TEST_CASE("environment presets") {
  auto pm = envs::make_env("pointmass-sparse");
  CHECK(pm->spec().obs_dim == 4);
  CHECK(pm->spec().action_dim == 2);
  CHECK(pm->spec().action_repeat == 4);
  CHECK(pm->spec().episode_length == 1000);
  CHECK(pm->spec().reward_type == envs::RewardType::kSparse);
  CHECK(pm->spec().intrinsic_weight == 0.3);

  auto pd = envs::make_env("pendulum-dense");
  CHECK(pd->spec().obs_dim == 3);
  CHECK(pd->spec().action_dim == 1);
  CHECK(pd->spec().action_repeat == 2);
  CHECK(pd->spec().reward_type == envs::RewardType::kDense);
  CHECK(pd->spec().intrinsic_weight == 0.2);

  CHECK_THROWS_AS(envs::make_env("does-not-exist"), ConfigError);
}

TEST_CASE("point mass at rest is a fixed point of zero action") {
  auto env = envs::make_env("pointmass-sparse");
  env->reset(0);
  env->set_state(std::vector<double>{0.2, 0.3, 0.0, 0.0});
  envs::Transition t = env->step(std::vector<double>{0.0, 0.0});
  CHECK(t.next_observation[0] == 0.2);
  CHECK(t.next_observation[1] == 0.3);
  CHECK(t.next_observation[2] == 0.0);
  CHECK(t.next_observation[3] == 0.0);
  CHECK(t.reward == 0.0);  // outside the goal disc
}

TEST_CASE("point mass scores one per env step inside the goal") {
  auto env = envs::make_env("pointmass-sparse");
  env->reset(0);
  env->set_state(std::vector<double>{0.65, 0.65, 0.0, 0.0});
  envs::Transition t = env->step(std::vector<double>{0.0, 0.0});
  // At rest in the goal center: every action_repeat unit step scores 1.
  CHECK(t.reward == static_cast<double>(env->spec().action_repeat));
}

TEST_CASE("sparse rewards are integral per decision") {
  auto env = envs::make_env("pointmass-sparse");
  env->reset(3);
  nn::Rng rng = nn::make_rng(3, 9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    envs::Transition t = env->step(std::vector<double>{u(rng), u(rng)});
    CHECK(t.reward >= 0.0);
    CHECK(t.reward <= static_cast<double>(env->spec().action_repeat));
    CHECK(t.reward == std::floor(t.reward));
  }
}

TEST_CASE("pendulum balanced upright with zero torque scores the maximum") {
  auto env = envs::make_env("pendulum-dense");
  env->reset(0);
  env->set_state(std::vector<double>{0.0, 0.0});
  envs::Transition t = env->step(std::vector<double>{0.0});
  // Upright is an equilibrium: reward is exactly 1 per unit step.
  CHECK(t.reward == static_cast<double>(env->spec().action_repeat));
  CHECK(t.next_observation[0] == 1.0);  // cos(0)
  CHECK(t.next_observation[1] == 0.0);  // sin(0)
}

TEST_CASE("pendulum rewards stay within the dense range") {
  auto env = envs::make_env("pendulum-dense");
  env->reset(11);
  nn::Rng rng = nn::make_rng(11, 9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    envs::Transition t = env->step(std::vector<double>{u(rng)});
    CHECK(t.reward >= 0.0);
    CHECK(t.reward <= static_cast<double>(env->spec().action_repeat));
  }
}

TEST_CASE("one repeated decision equals that many unit steps") {
  auto repeated = envs::make_env("pointmass-sparse", /*action_repeat=*/4);
  auto unit = envs::make_env("pointmass-sparse", /*action_repeat=*/1);
  repeated->reset(5);
  unit->reset(5);

  nn::Rng rng = nn::make_rng(5, 9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int decision = 0; decision < 20; ++decision) {
    const std::vector<double> a = {u(rng), u(rng)};
    envs::Transition big = repeated->step(a);
    double reward = 0.0;
    envs::Transition last;
    for (int r = 0; r < 4; ++r) {
      last = unit->step(a);
      reward += last.reward;
    }
    CHECK(big.reward == reward);
    REQUIRE(big.next_observation.size() == last.next_observation.size());
    for (std::size_t i = 0; i < big.next_observation.size(); ++i) {
      CHECK(big.next_observation[i] == last.next_observation[i]);
    }
  }
}

TEST_CASE("out of bounds actions are clamped and counted") {
  auto env = envs::make_env("pointmass-sparse");
  env->reset(0);
  CHECK(env->clamp_warnings() == 0);
  envs::Transition t = env->step(std::vector<double>{2.0, -3.0});
  CHECK(env->clamp_warnings() == 1);
  CHECK(t.action[0] == 1.0);
  CHECK(t.action[1] == -1.0);
  env->step(std::vector<double>{0.5, 0.5});
  CHECK(env->clamp_warnings() == 1);  // in-bounds step adds nothing
}

TEST_CASE("episodes terminate at episode length and reject further steps") {
  auto env = envs::make_env("pointmass-sparse", 4, /*episode_length=*/8);
  env->reset(2);
  envs::Transition t1 = env->step(std::vector<double>{0.1, 0.1});
  CHECK(!t1.done);
  envs::Transition t2 = env->step(std::vector<double>{0.1, 0.1});
  CHECK(t2.done);
  CHECK(env->steps_taken() == 8);
  CHECK_THROWS_AS(env->step(std::vector<double>{0.0, 0.0}), Error);
  env->reset(2);
  CHECK(env->steps_taken() == 0);
}

TEST_CASE("stepping before reset is an error") {
  auto env = envs::make_env("pendulum-dense");
  CHECK_THROWS_AS(env->step(std::vector<double>{0.0}), Error);
  CHECK_THROWS_AS(env->set_state(std::vector<double>{0.0, 0.0}), Error);
}

TEST_CASE("same seed and actions give identical transitions") {
  auto a = envs::make_env("pendulum-dense");
  auto b = envs::make_env("pendulum-dense");
  std::vector<double> obs_a = a->reset(4);
  std::vector<double> obs_b = b->reset(4);
  for (std::size_t i = 0; i < obs_a.size(); ++i) CHECK(obs_a[i] == obs_b[i]);

  nn::Rng rng = nn::make_rng(4, 9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const std::vector<double> act = {u(rng)};
    envs::Transition ta = a->step(act);
    envs::Transition tb = b->step(act);
    CHECK(ta.reward == tb.reward);
    for (std::size_t j = 0; j < ta.next_observation.size(); ++j) {
      CHECK(ta.next_observation[j] == tb.next_observation[j]);
    }
  }
}

TEST_CASE("augmentation with zero noise is the identity") {
  nn::Rng rng = nn::make_rng(0, 9);
  const std::vector<double> obs = {0.1, -0.2, 0.3, 0.4};
  std::vector<double> out = envs::augment(obs, 0.0, rng);
  for (std::size_t i = 0; i < obs.size(); ++i) CHECK(out[i] == obs[i]);
  CHECK_THROWS_AS(envs::augment(obs, -0.1, rng), Error);
}

TEST_CASE("augmentation noise has the requested scale") {
  nn::Rng rng = nn::make_rng(1, 9);
  const std::vector<double> obs = {0.0, 0.0, 0.0, 0.0};
  const double noise_std = 0.3;
  const int calls = 25000;  // 100k samples total
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < calls; ++i) {
    std::vector<double> out = envs::augment(obs, noise_std, rng);
    for (double v : out) {
      sum += v;
      sum_sq += v * v;
    }
  }
  const double n = 4.0 * calls;
  const double mean = sum / n;
  const double std = std::sqrt(sum_sq / n - mean * mean);
  CHECK(std::abs(mean) < 5.0 * noise_std / std::sqrt(n));
  CHECK(std == doctest::Approx(noise_std).epsilon(0.05));
}

TEST_CASE("env spec validation") {
  envs::EnvSpec spec;
  spec.name = "x";
  spec.obs_dim = 2;
  spec.action_dim = 1;
  spec.action_repeat = 4;
  spec.episode_length = 10;  // not a multiple of the repeat
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.episode_length = 12;
  spec.validate();
}
