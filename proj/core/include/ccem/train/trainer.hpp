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

#ifndef CCEM_TRAIN_TRAINER_HPP_
#define CCEM_TRAIN_TRAINER_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccem/curiosity/icm.hpp"
#include "ccem/envs/env.hpp"
#include "ccem/nn/adam.hpp"
#include "ccem/nn/param_vector.hpp"
#include "ccem/planner/cem.hpp"
#include "ccem/told/losses.hpp"
#include "ccem/told/model.hpp"
#include "ccem/train/metrics.hpp"
#include "ccem/train/replay.hpp"

namespace ccem::train {

struct TrainConfig {
  std::int64_t total_env_steps = 30000;
  std::int64_t seed_steps = 1000;  // env steps of uniform random actions
  int updates_per_episode = 0;     // 0 = one update per decision
  int batch = 256;
  int horizon_k = 5;               // sampled trajectory length
  std::int64_t eval_every = 10000; // env steps between evaluations
  int eval_episodes = 10;
  double lr_model = 3e-4;
  double lr_inverse = 3e-4;
  double lr_contrastive = 1e-5;
  double zeta = 0.01;
  int target_q_update_every = 2;       // in update() calls
  int target_encoder_update_every = 1;
  told::LossWeights weights;
  double contrastive_coeff = 2.0;
  double intrinsic_C = 0.2;
  double intrinsic_alpha = 1e-5;
  bool non_contrastive = false;  // skip the contrastive update
  bool non_ccem = false;         // intrinsic reward forced to zero
  std::size_t replay_capacity = 100000;
  double augment_noise = 0.01;   // observation noise std during updates
  double explore_noise_start = 0.5;
  double explore_noise_end = 0.05;
  std::int64_t explore_decay_steps = 5000;  // anneal window after seed phase
  bool deterministic_timing = false;        // wall_clock_s written as 0

  void validate() const;
};

// Everything one training run needs. Model dims must already agree with the
// chosen environment (config plumbing fills them in).
struct TrainerSetup {
  std::string env_name = "pointmass-sparse";
  int action_repeat = 0;    // 0 = env preset
  int episode_length = 0;   // 0 = env preset
  told::ToldConfig told;
  curiosity::IcmConfig icm;
  planner::CemConfig cem;
  TrainConfig train;
  std::uint64_t seed = 0;
  std::string metrics_path;     // empty = keep metrics in memory only
  std::string checkpoint_stem;  // empty = no checkpoints
};

struct EpisodeStats {
  double episode_return = 0.0;
  int decisions = 0;
  double elite_score_mean = 0.0;  // mean over the episode's plan calls
  bool random_policy = false;     // seed-phase episode
};

struct UpdateRecord {
  double loss_q = 0.0;
  double loss_reward = 0.0;
  double loss_consistency = 0.0;
  double loss_policy = 0.0;
  double loss_inverse = 0.0;
  double loss_contrastive = 0.0;
  double intrinsic_mean = 0.0;
};

struct RunResult {
  std::vector<double> eval_returns;       // one per evaluation point
  std::vector<std::int64_t> eval_steps;
  double final_eval_return = 0.0;
  // First planner-driven train episode with return > 0, in env steps; the
  // seed-phase random walk does not count. -1 when it never happens.
  std::int64_t first_success_step = -1;
  std::int64_t env_steps = 0;
  std::int64_t clamp_warnings = 0;
};

// Owns one environment, one model/ICM parameter vector, the three optimizers
// and the replay buffer, and runs the collect / update / evaluate loop. One
// instance per (config, seed); no shared mutable state between instances.
class Trainer {
 public:
  explicit Trainer(TrainerSetup setup);

  // Runs one full episode. Uses uniform random actions until seed_steps,
  // afterwards the planner plus annealed Gaussian exploration noise.
  EpisodeStats collect_episode();

  // One gradient step each on the model objective, the inverse objective and
  // (unless disabled) the contrastive objective, then the EMA targets, in
  // that order. Requires batch * (k+1) stored transitions.
  UpdateRecord update();

  // Mean return over eval_episodes with fixed per-episode seeds and no
  // exploration noise. Does not touch params, buffer or training RNG streams.
  double evaluate(int eval_index);

  // Full training loop; writes the metrics stream and checkpoints.
  RunResult run();

  const nn::ParamVector& params() const { return params_; }
  nn::ParamVector& mutable_params() { return params_; }
  const told::ToldModel& model() const { return *model_; }
  const curiosity::Icm& icm() const { return *icm_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const curiosity::IntrinsicConfig& intrinsic() const { return intrinsic_; }
  std::int64_t env_steps() const { return env_steps_; }
  const TrainerSetup& setup() const { return setup_; }

  // Gradient step ratio gate from the config, exposed for tests.
  std::size_t min_buffer_size() const;

 private:
  std::vector<double> plan_action(std::span<const double> observation,
                                  nn::Rng& plan_rng, double noise_std,
                                  double* elite_mean);
  double exploration_noise() const;
  void write_row(const MetricsRow& row);
  double elapsed_seconds() const;

  TrainerSetup setup_;
  std::unique_ptr<envs::Env> env_;
  std::unique_ptr<told::ToldModel> model_;
  std::unique_ptr<curiosity::Icm> icm_;
  nn::LayoutPtr layout_;
  nn::ParamVector params_;
  std::unique_ptr<nn::AdamOptimizer> opt_model_;
  std::unique_ptr<nn::AdamOptimizer> opt_inverse_;
  std::unique_ptr<nn::AdamOptimizer> opt_contrastive_;
  ReplayBuffer buffer_;
  curiosity::IntrinsicConfig intrinsic_;
  std::unique_ptr<MetricsWriter> metrics_;

  nn::Rng rng_plan_;
  nn::Rng rng_explore_;
  nn::Rng rng_replay_;
  nn::Rng rng_augment_;

  std::int64_t env_steps_ = 0;
  std::int64_t episodes_collected_ = 0;
  std::int64_t updates_done_ = 0;
  double start_time_s_ = 0.0;
};

}  // namespace ccem::train

#endif  // CCEM_TRAIN_TRAINER_HPP_
