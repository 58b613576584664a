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

#include "ccem/envs/env.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ccem/error.hpp"

namespace ccem::envs {

void EnvSpec::validate() const {
  if (obs_dim < 1 || action_dim < 1) throw ConfigError("EnvSpec: dims < 1");
  if (action_repeat < 1) throw ConfigError("EnvSpec: action_repeat < 1");
  if (episode_length < 1 || episode_length % action_repeat != 0) {
    throw ConfigError("EnvSpec: episode_length must be a positive multiple of "
                      "action_repeat");
  }
  if (intrinsic_weight < 0.0) throw ConfigError("EnvSpec: intrinsic_weight < 0");
}

Env::Env(EnvSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Transition Env::step(std::span<const double> action) {
  if (!episode_open_) throw Error("Env::step: episode not open; call reset()");
  if (static_cast<int>(action.size()) != spec_.action_dim) {
    throw DimensionError("Env::step: action dim " + std::to_string(action.size()) +
                         " != " + std::to_string(spec_.action_dim));
  }
  Transition t;
  t.observation = observe();
  t.action.assign(action.begin(), action.end());
  bool clamped = false;
  for (double& a : t.action) {
    if (a < -1.0 || a > 1.0) {
      a = std::clamp(a, -1.0, 1.0);
      clamped = true;
    }
  }
  if (clamped) ++clamp_warnings_;

  for (int r = 0; r < spec_.action_repeat; ++r) {
    t.reward += unit_step(t.action);
    ++steps_taken_;
  }
  t.next_observation = observe();
  t.done = steps_taken_ >= spec_.episode_length;
  if (t.done) episode_open_ = false;
  return t;
}

std::vector<double> augment(std::span<const double> observation, double noise_std,
                            nn::Rng& rng) {
  if (noise_std < 0.0) throw Error("augment: noise_std must be >= 0");
  std::vector<double> out(observation.begin(), observation.end());
  if (noise_std == 0.0) return out;
  std::normal_distribution<double> noise(0.0, noise_std);
  for (double& x : out) x += noise(rng);
  return out;
}

namespace {

// 2D point mass in the unit box. Velocity integrates the action with
// friction; reward is 1 per env step inside the goal disc, 0 elsewhere.
class PointMassSparse final : public Env {
 public:
  explicit PointMassSparse(EnvSpec spec) : Env(std::move(spec)) {}

  std::vector<double> reset(std::uint64_t seed) override {
    nn::Rng rng = nn::make_rng(seed, /*stream=*/0);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    px_ = jitter(rng);
    py_ = jitter(rng);
    vx_ = 0.0;
    vy_ = 0.0;
    steps_taken_ = 0;
    episode_open_ = true;
    return observe();
  }

  void set_state(std::span<const double> state) override {
    if (!episode_open_) throw Error("set_state: episode not open; call reset()");
    if (state.size() != 4) throw DimensionError("set_state: expected {px, py, vx, vy}");
    px_ = state[0];
    py_ = state[1];
    vx_ = state[2];
    vy_ = state[3];
  }

 protected:
  double unit_step(std::span<const double> action) override {
    vx_ = kFriction * vx_ + kGain * action[0];
    vy_ = kFriction * vy_ + kGain * action[1];
    px_ += kDt * vx_;
    py_ += kDt * vy_;
    if (px_ < -1.0 || px_ > 1.0) {
      px_ = std::clamp(px_, -1.0, 1.0);
      vx_ = 0.0;
    }
    if (py_ < -1.0 || py_ > 1.0) {
      py_ = std::clamp(py_, -1.0, 1.0);
      vy_ = 0.0;
    }
    const double dx = px_ - kGoalX;
    const double dy = py_ - kGoalY;
    return dx * dx + dy * dy <= kGoalRadius * kGoalRadius ? 1.0 : 0.0;
  }

  std::vector<double> observe() const override { return {px_, py_, vx_, vy_}; }

 private:
  static constexpr double kFriction = 0.9;
  static constexpr double kGain = 0.1;
  static constexpr double kDt = 0.05;
  static constexpr double kGoalX = 0.65;
  static constexpr double kGoalY = 0.65;
  static constexpr double kGoalRadius = 0.1;

  double px_ = 0.0, py_ = 0.0, vx_ = 0.0, vy_ = 0.0;
};

// Torque-limited pendulum swing-up. Angle 0 is upright; reward per env step
// is (1 + cos(angle)) / 2, maximal at the top. The torque bound is far below
// gravity, so the pendulum must pump energy to get up.
class PendulumDense final : public Env {
 public:
  explicit PendulumDense(EnvSpec spec) : Env(std::move(spec)) {}

  std::vector<double> reset(std::uint64_t seed) override {
    nn::Rng rng = nn::make_rng(seed, /*stream=*/0);
    std::uniform_real_distribution<double> angle_jitter(-0.1, 0.1);
    std::uniform_real_distribution<double> speed_jitter(-0.05, 0.05);
    theta_ = kPi + angle_jitter(rng);
    omega_ = speed_jitter(rng);
    steps_taken_ = 0;
    episode_open_ = true;
    return observe();
  }

  void set_state(std::span<const double> state) override {
    if (!episode_open_) throw Error("set_state: episode not open; call reset()");
    if (state.size() != 2) throw DimensionError("set_state: expected {theta, omega}");
    theta_ = state[0];
    omega_ = state[1];
  }

 protected:
  double unit_step(std::span<const double> action) override {
    const double torque = kMaxTorque * action[0];
    const double accel = kGravity * std::sin(theta_) + kTorqueGain * torque;
    omega_ = std::clamp(omega_ + kDt * accel, -kMaxSpeed, kMaxSpeed);
    theta_ += kDt * omega_;
    theta_ = std::remainder(theta_, 2.0 * kPi);
    return (1.0 + std::cos(theta_)) / 2.0;
  }

  std::vector<double> observe() const override {
    return {std::cos(theta_), std::sin(theta_), omega_};
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 15.0;   // g/l term pushing off upright
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kTorqueGain = 3.0;
  static constexpr double kMaxSpeed = 8.0;

  double theta_ = kPi, omega_ = 0.0;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& name, int action_repeat,
                              int episode_length) {
  EnvSpec spec;
  spec.name = name;
  if (name == "pointmass-sparse") {
    spec.obs_dim = 4;
    spec.action_dim = 2;
    spec.action_repeat = 4;
    spec.reward_type = RewardType::kSparse;
    spec.intrinsic_weight = 0.3;
  } else if (name == "pendulum-dense") {
    spec.obs_dim = 3;
    spec.action_dim = 1;
    spec.action_repeat = 2;
    spec.reward_type = RewardType::kDense;
    spec.intrinsic_weight = 0.2;
  } else {
    throw ConfigError("make_env: unknown environment '" + name + "'");
  }
  if (action_repeat > 0) spec.action_repeat = action_repeat;
  if (episode_length > 0) spec.episode_length = episode_length;
  if (name == "pointmass-sparse") return std::make_unique<PointMassSparse>(spec);
  return std::make_unique<PendulumDense>(spec);
}

}  // namespace ccem::envs
