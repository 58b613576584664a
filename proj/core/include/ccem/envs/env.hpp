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

#ifndef CCEM_ENVS_ENV_HPP_
#define CCEM_ENVS_ENV_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ccem/nn/rng.hpp"

namespace ccem::envs {

enum class RewardType { kDense, kSparse };

struct EnvSpec {
  std::string name;
  int obs_dim = 0;
  int action_dim = 0;
  int episode_length = 1000;  // in env steps, divisible by action_repeat
  int action_repeat = 1;
  RewardType reward_type = RewardType::kDense;
  double intrinsic_weight = 0.2;  // per-task C preset

  void validate() const;
};

struct Transition {
  std::vector<double> observation;
  std::vector<double> action;  // as applied (clamped)
  double reward = 0.0;         // summed over action_repeat unit steps
  std::vector<double> next_observation;
  bool done = false;
};

// Deterministic state-machine environment: same seed and action sequence
// give identical transitions. One agent decision advances `action_repeat`
// env steps and sums their rewards.
class Env {
 public:
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }
  virtual std::vector<double> reset(std::uint64_t seed) = 0;

  // Overwrites the physical state mid-episode (diagnostics and tests).
  // Layout: pointmass-sparse {px, py, vx, vy}; pendulum-dense {theta, omega}.
  virtual void set_state(std::span<const double> state) = 0;

  // Clamps out-of-bounds actions (counted in clamp_warnings) and applies the
  // clamped action for action_repeat unit steps. Throws after episode end.
  Transition step(std::span<const double> action);

  std::int64_t steps_taken() const { return steps_taken_; }  // env steps
  std::int64_t clamp_warnings() const { return clamp_warnings_; }

 protected:
  explicit Env(EnvSpec spec);
  // One env step under an in-bounds action; returns the step reward.
  virtual double unit_step(std::span<const double> action) = 0;
  virtual std::vector<double> observe() const = 0;

  EnvSpec spec_;
  std::int64_t steps_taken_ = 0;
  std::int64_t clamp_warnings_ = 0;
  bool episode_open_ = false;
};

// Adds Gaussian observation noise (the vector-observation stand-in for image
// shift augmentation). noise_std = 0 returns the input unchanged.
std::vector<double> augment(std::span<const double> observation, double noise_std,
                            nn::Rng& rng);

// Bundled environments: "pointmass-sparse" and "pendulum-dense". Zero
// overrides keep the per-env presets.
std::unique_ptr<Env> make_env(const std::string& name, int action_repeat = 0,
                              int episode_length = 0);

}  // namespace ccem::envs

#endif  // CCEM_ENVS_ENV_HPP_
