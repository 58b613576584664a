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

// Microbenchmarks for the training hot paths: network forward/backward, the
// K-step model objective, one planning call, and replay sampling.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "ccem/nn/mlp.hpp"
#include "ccem/nn/param_vector.hpp"
#include "ccem/nn/rng.hpp"
#include "ccem/planner/cem.hpp"
#include "ccem/told/losses.hpp"
#include "ccem/told/model.hpp"
#include "ccem/train/replay.hpp"

namespace {

using namespace ccem;

double draw(nn::Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct MlpFixture {
  nn::Mlp net;
  nn::ParamVector params;
  std::vector<double> x;

  MlpFixture(int in, int hidden, int layers, int out)
      : net("bench", nn::MlpSpec{in, std::vector<int>(layers, hidden), out,
                                 nn::Activation::kElu, false}) {
    auto layout = std::make_shared<nn::ParamLayout>();
    net.declare(*layout);
    net.bind(*layout);
    params = nn::ParamVector(layout);
    auto rng = nn::make_rng(0, 1);
    net.init_params(params, rng);
    x.resize(static_cast<std::size_t>(in));
    for (auto& v : x) v = draw(rng, -1.0, 1.0);
  }
};

// Model sized like the full-scale defaults (256-wide, two hidden layers).
void BM_MlpForward(benchmark::State& state) {
  MlpFixture f(4, 256, 2, 32);
  std::vector<double> y;
  for (auto _ : state) {
    f.net.forward(f.params, f.x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_MlpForward)->Unit(benchmark::kMicrosecond);

void BM_MlpBackward(benchmark::State& state) {
  MlpFixture f(4, 256, 2, 32);
  nn::ParamVector grad(f.params.layout_ptr());
  std::vector<double> y;
  nn::MlpCache cache;
  std::vector<double> y_grad(32, 1.0);
  for (auto _ : state) {
    f.net.forward(f.params, f.x, y, &cache);
    grad.zero();
    f.net.backward(f.params, cache, y_grad, 1.0, &grad, {});
    benchmark::DoNotOptimize(grad.values().data());
  }
}
BENCHMARK(BM_MlpBackward)->Unit(benchmark::kMicrosecond);

struct ModelFixture {
  told::ToldModel model;
  nn::ParamVector params;
  nn::Rng rng = nn::make_rng(0, 1);

  explicit ModelFixture(const told::ToldConfig& cfg) : model(cfg) {
    auto layout = std::make_shared<nn::ParamLayout>();
    model.declare(*layout);
    model.bind(*layout);
    params = nn::ParamVector(layout);
    model.init_params(params, rng);
  }

  std::vector<double> random_vec(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& e : v) e = draw(rng, -1.0, 1.0);
    return v;
  }
};

told::ToldConfig desk_config() {
  told::ToldConfig cfg;
  cfg.obs_dim = 4;
  cfg.latent_dim = 10;
  cfg.action_dim = 2;
  cfg.encoder_hidden = 32;
  cfg.encoder_layers = 1;
  cfg.head_hidden = 32;
  cfg.head_layers = 1;
  return cfg;
}

// The K = 3 objective with gradient accumulation, at the desk scale used by
// the experiment configs.
void BM_ToldObjective(benchmark::State& state) {
  ModelFixture f(desk_config());
  nn::ParamVector grad(f.params.layout_ptr());

  constexpr int kSteps = 3;
  told::Trajectory traj;
  for (int i = 0; i <= kSteps; ++i) traj.observations.push_back(f.random_vec(4));
  for (int i = 0; i < kSteps; ++i) {
    traj.actions.push_back(f.random_vec(2));
    traj.rewards.push_back(draw(f.rng, 0.0, 1.0));
  }
  std::vector<double> intrinsic(kSteps, 0.05);
  told::LossWeights weights;

  for (auto _ : state) {
    grad.zero();
    auto losses = told::told_objective(f.model, f.params, f.params, traj,
                                       intrinsic, weights, &grad);
    benchmark::DoNotOptimize(losses.total);
  }
}
BENCHMARK(BM_ToldObjective)->Unit(benchmark::kMicrosecond);

// One full planning call at the desk-scale planner settings.
void BM_Plan(benchmark::State& state) {
  ModelFixture f(desk_config());
  planner::CemConfig cfg;
  cfg.horizon = 3;
  cfg.population = 64;
  cfg.elites = 8;
  cfg.iterations = 3;
  const auto obs = f.random_vec(4);

  for (auto _ : state) {
    auto result = planner::plan(f.model, f.params, cfg, obs, f.rng);
    benchmark::DoNotOptimize(result.action.data());
  }
}
BENCHMARK(BM_Plan)->Unit(benchmark::kMicrosecond);

void BM_ReplaySample(benchmark::State& state) {
  train::ReplayBuffer buffer(100000);
  auto rng = nn::make_rng(0, 1);
  for (int e = 0; e < 100; ++e) {
    train::Episode ep;
    for (int i = 0; i <= 250; ++i)
      ep.observations.push_back({draw(rng, -1.0, 1.0), 0.0, 0.0, 0.0});
    for (int i = 0; i < 250; ++i) {
      ep.actions.push_back({0.1, -0.1});
      ep.rewards.push_back(0.0);
    }
    buffer.add_episode(std::move(ep));
  }
  for (auto _ : state) {
    auto slice = buffer.sample(3, rng);
    benchmark::DoNotOptimize(slice.rewards.data());
  }
}
BENCHMARK(BM_ReplaySample)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
