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

#include "ccem/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "ccem/error.hpp"

namespace ccem::train {

namespace {

// RNG stream ids; distinct per concern so adding draws to one concern does
// not shift another.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamPlan = 3;
constexpr std::uint64_t kStreamExplore = 4;
constexpr std::uint64_t kStreamReplay = 5;
constexpr std::uint64_t kStreamAugment = 6;
constexpr std::uint64_t kStreamEpisodeSeeds = 100;
constexpr std::uint64_t kStreamEvalSeeds = 1000;
constexpr std::uint64_t kStreamEvalPlan = 5000;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

void TrainConfig::validate() const {
  if (total_env_steps < 1) throw ConfigError("TrainConfig: total_env_steps < 1");
  if (seed_steps < 0) throw ConfigError("TrainConfig: seed_steps < 0");
  if (updates_per_episode < 0) {
    throw ConfigError("TrainConfig: updates_per_episode < 0");
  }
  if (batch < 1) throw ConfigError("TrainConfig: batch < 1");
  if (horizon_k < 1) throw ConfigError("TrainConfig: horizon_k < 1");
  if (eval_every < 1) throw ConfigError("TrainConfig: eval_every < 1");
  if (eval_episodes < 1) throw ConfigError("TrainConfig: eval_episodes < 1");
  if (!(lr_model > 0.0) || !(lr_inverse > 0.0) || !(lr_contrastive > 0.0)) {
    throw ConfigError("TrainConfig: learning rates must be > 0");
  }
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw ConfigError("TrainConfig: zeta in [0,1]");
  if (target_q_update_every < 1 || target_encoder_update_every < 1) {
    throw ConfigError("TrainConfig: target update frequencies must be >= 1");
  }
  weights.validate();
  if (contrastive_coeff < 0.0) {
    throw ConfigError("TrainConfig: contrastive_coeff < 0");
  }
  if (intrinsic_C < 0.0 || intrinsic_alpha < 0.0) {
    throw ConfigError("TrainConfig: intrinsic constants must be >= 0");
  }
  if (replay_capacity == 0) throw ConfigError("TrainConfig: replay_capacity == 0");
  if (augment_noise < 0.0) throw ConfigError("TrainConfig: augment_noise < 0");
  if (explore_noise_start < 0.0 || explore_noise_end < 0.0 ||
      explore_decay_steps < 0) {
    throw ConfigError("TrainConfig: exploration noise settings must be >= 0");
  }
}

Trainer::Trainer(TrainerSetup setup)
    : setup_(std::move(setup)),
      buffer_(setup_.train.replay_capacity),
      rng_plan_(nn::make_rng(setup_.seed, kStreamPlan)),
      rng_explore_(nn::make_rng(setup_.seed, kStreamExplore)),
      rng_replay_(nn::make_rng(setup_.seed, kStreamReplay)),
      rng_augment_(nn::make_rng(setup_.seed, kStreamAugment)) {
  setup_.train.validate();
  env_ = envs::make_env(setup_.env_name, setup_.action_repeat,
                        setup_.episode_length);
  const auto& spec = env_->spec();
  if (setup_.told.obs_dim == 0) setup_.told.obs_dim = spec.obs_dim;
  if (setup_.told.action_dim == 0) setup_.told.action_dim = spec.action_dim;
  if (setup_.told.obs_dim != spec.obs_dim ||
      setup_.told.action_dim != spec.action_dim) {
    throw ConfigError("Trainer: model dims disagree with env '" + spec.name + "'");
  }
  if (setup_.icm.latent_dim == 0) setup_.icm.latent_dim = setup_.told.latent_dim;
  if (setup_.icm.action_dim == 0) setup_.icm.action_dim = spec.action_dim;
  if (setup_.icm.latent_dim != setup_.told.latent_dim ||
      setup_.icm.action_dim != setup_.told.action_dim) {
    throw ConfigError("Trainer: ICM dims disagree with the model");
  }
  setup_.cem.validate(spec.action_dim);

  model_ = std::make_unique<told::ToldModel>(setup_.told);
  icm_ = std::make_unique<curiosity::Icm>(setup_.icm);
  auto layout = std::make_shared<nn::ParamLayout>();
  model_->declare(*layout);
  icm_->declare(*layout);
  layout_ = layout;
  model_->bind(*layout_);
  icm_->bind(*layout_);
  params_ = nn::ParamVector(layout_);
  nn::Rng init_rng = nn::make_rng(setup_.seed, kStreamInit);
  model_->init_params(params_, init_rng);
  icm_->init_params(params_, init_rng);

  auto inverse_group = icm_->inverse_segments();
  auto contrastive_group = icm_->contrastive_segments();
  const auto encoder_group = model_->encoder_segments();
  inverse_group.insert(inverse_group.end(), encoder_group.begin(),
                       encoder_group.end());
  contrastive_group.insert(contrastive_group.end(), encoder_group.begin(),
                           encoder_group.end());
  opt_model_ = std::make_unique<nn::AdamOptimizer>(
      *layout_, model_->online_segments(), setup_.train.lr_model);
  opt_inverse_ = std::make_unique<nn::AdamOptimizer>(*layout_, inverse_group,
                                                     setup_.train.lr_inverse);
  opt_contrastive_ = std::make_unique<nn::AdamOptimizer>(
      *layout_, contrastive_group, setup_.train.lr_contrastive);

  intrinsic_.C = setup_.train.intrinsic_C;
  intrinsic_.alpha = setup_.train.intrinsic_alpha;

  if (!setup_.metrics_path.empty()) {
    metrics_ = std::make_unique<MetricsWriter>(setup_.metrics_path);
  }
  start_time_s_ = now_seconds();
}

std::size_t Trainer::min_buffer_size() const {
  return static_cast<std::size_t>(setup_.train.batch) *
         static_cast<std::size_t>(setup_.train.horizon_k + 1);
}

double Trainer::exploration_noise() const {
  const auto& t = setup_.train;
  const std::int64_t window = t.seed_steps + t.explore_decay_steps;
  if (window <= 0) return t.explore_noise_end;
  const double frac =
      std::min(1.0, static_cast<double>(env_steps_) / static_cast<double>(window));
  return t.explore_noise_start + frac * (t.explore_noise_end - t.explore_noise_start);
}

double Trainer::elapsed_seconds() const {
  if (setup_.train.deterministic_timing) return 0.0;
  return now_seconds() - start_time_s_;
}

std::vector<double> Trainer::plan_action(std::span<const double> observation,
                                         nn::Rng& plan_rng, double noise_std,
                                         double* elite_mean) {
  auto result = planner::plan(*model_, params_, setup_.cem, observation, plan_rng);
  if (elite_mean != nullptr && !result.iterations.empty()) {
    *elite_mean = result.iterations.back().elite_mean;
  }
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (double& a : result.action) {
      a = std::clamp(a + noise(rng_explore_), -1.0, 1.0);
    }
  }
  return result.action;
}

EpisodeStats Trainer::collect_episode() {
  const auto& spec = env_->spec();
  auto obs = env_->reset(nn::mix_seed(setup_.seed, kStreamEpisodeSeeds +
                                      static_cast<std::uint64_t>(episodes_collected_)));
  Episode episode;
  EpisodeStats stats;
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  double elite_sum = 0.0;
  int plan_calls = 0;

  bool done = false;
  while (!done) {
    std::vector<double> action(static_cast<std::size_t>(spec.action_dim));
    if (env_steps_ < setup_.train.seed_steps) {
      stats.random_policy = true;
      for (double& a : action) a = uniform(rng_explore_);
    } else {
      double elite_mean = 0.0;
      action = plan_action(obs, rng_plan_, exploration_noise(), &elite_mean);
      elite_sum += elite_mean;
      ++plan_calls;
    }
    auto t = env_->step(action);
    env_steps_ += spec.action_repeat;
    intrinsic_.observe_extrinsic(t.reward);
    episode.observations.push_back(std::move(t.observation));
    episode.actions.push_back(std::move(t.action));
    episode.rewards.push_back(t.reward);
    stats.episode_return += t.reward;
    ++stats.decisions;
    obs = t.next_observation;
    if (t.done) {
      episode.observations.push_back(std::move(t.next_observation));
      done = true;
    }
  }
  buffer_.add_episode(std::move(episode));
  ++episodes_collected_;
  stats.elite_score_mean = plan_calls > 0 ? elite_sum / plan_calls : 0.0;
  return stats;
}

UpdateRecord Trainer::update() {
  const auto& t = setup_.train;
  if (buffer_.size() < min_buffer_size()) {
    throw Error("Trainer::update: replay holds " + std::to_string(buffer_.size()) +
                " transitions, need " + std::to_string(min_buffer_size()));
  }
  const int batch = t.batch;
  const int k = t.horizon_k;
  const double inv_batch = 1.0 / static_cast<double>(batch);

  std::vector<told::Trajectory> batch_trajs;
  batch_trajs.reserve(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    auto traj = buffer_.sample(k, rng_replay_);
    for (auto& o : traj.observations) {
      o = envs::augment(o, t.augment_noise, rng_augment_);
    }
    batch_trajs.push_back(std::move(traj));
  }

  UpdateRecord record;
  std::vector<std::vector<double>> intrinsic(
      static_cast<std::size_t>(batch),
      std::vector<double>(static_cast<std::size_t>(k), 0.0));
  if (!t.non_ccem) {
    for (int b = 0; b < batch; ++b) {
      const auto& traj = batch_trajs[static_cast<std::size_t>(b)];
      std::vector<std::vector<double>> target_latents;
      target_latents.reserve(traj.observations.size());
      for (const auto& o : traj.observations) {
        target_latents.push_back(model_->encode_target(params_, o));
      }
      for (int j = 0; j < k; ++j) {
        const double r_i = curiosity::intrinsic_reward(
            *model_, params_, intrinsic_, target_latents[static_cast<std::size_t>(j)],
            traj.actions[static_cast<std::size_t>(j)],
            target_latents[static_cast<std::size_t>(j + 1)], env_steps_);
        intrinsic[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] = r_i;
        record.intrinsic_mean += r_i * inv_batch / k;
      }
    }
  }

  nn::ParamVector grad(layout_);

  // Model objective (value, reward, consistency, policy terms).
  for (int b = 0; b < batch; ++b) {
    const auto losses = told::told_objective(
        *model_, params_, params_, batch_trajs[static_cast<std::size_t>(b)],
        intrinsic[static_cast<std::size_t>(b)], t.weights, &grad, inv_batch);
    record.loss_q += losses.q * inv_batch;
    record.loss_reward += losses.reward * inv_batch;
    record.loss_consistency += losses.consistency * inv_batch;
    record.loss_policy += losses.policy * inv_batch;
  }
  opt_model_->step(params_, grad);

  // Inverse dynamics objective (sum over the slice, mean over the batch).
  grad.zero();
  for (int b = 0; b < batch; ++b) {
    const auto& traj = batch_trajs[static_cast<std::size_t>(b)];
    for (int j = 0; j < k; ++j) {
      record.loss_inverse +=
          inv_batch * icm_->inverse_loss(
                          *model_, params_, traj.observations[static_cast<std::size_t>(j)],
                          traj.observations[static_cast<std::size_t>(j + 1)],
                          traj.actions[static_cast<std::size_t>(j)], inv_batch, &grad);
    }
  }
  opt_inverse_->step(params_, grad);

  // Contrastive objective over the first transition of each slice.
  if (!t.non_contrastive) {
    grad.zero();
    std::vector<std::vector<double>> obs0, act0, obs1;
    obs0.reserve(static_cast<std::size_t>(batch));
    act0.reserve(static_cast<std::size_t>(batch));
    obs1.reserve(static_cast<std::size_t>(batch));
    for (const auto& traj : batch_trajs) {
      obs0.push_back(traj.observations[0]);
      act0.push_back(traj.actions[0]);
      obs1.push_back(traj.observations[1]);
    }
    record.loss_contrastive = icm_->temporal_contrastive_loss(
        *model_, params_, params_, obs0, act0, obs1, t.contrastive_coeff, &grad);
    opt_contrastive_->step(params_, grad);
  }

  ++updates_done_;
  if (updates_done_ % t.target_encoder_update_every == 0) {
    model_->ema_encoder_target(params_, t.zeta);
  }
  if (updates_done_ % t.target_q_update_every == 0) {
    model_->ema_q_target(params_, t.zeta);
  }
  return record;
}

double Trainer::evaluate(int eval_index) {
  auto env = envs::make_env(setup_.env_name, setup_.action_repeat,
                            setup_.episode_length);
  double total = 0.0;
  for (int ep = 0; ep < setup_.train.eval_episodes; ++ep) {
    auto obs = env->reset(nn::mix_seed(setup_.seed,
                                       kStreamEvalSeeds + static_cast<std::uint64_t>(ep)));
    nn::Rng plan_rng = nn::make_rng(
        setup_.seed, kStreamEvalPlan +
                         static_cast<std::uint64_t>(eval_index) * 100ULL +
                         static_cast<std::uint64_t>(ep));
    bool done = false;
    while (!done) {
      const auto action = plan_action(obs, plan_rng, 0.0, nullptr);
      auto tr = env->step(action);
      total += tr.reward;
      obs = std::move(tr.next_observation);
      done = tr.done;
    }
  }
  return total / setup_.train.eval_episodes;
}

void Trainer::write_row(const MetricsRow& row) {
  if (metrics_) {
    metrics_->write(row);
    metrics_->flush();
  }
}

RunResult Trainer::run() {
  const auto& t = setup_.train;
  RunResult result;
  std::int64_t next_eval = t.eval_every;
  int eval_index = 0;

  try {
    while (env_steps_ < t.total_env_steps) {
      const auto stats = collect_episode();
      // Success is attributed to the planner: the seed-phase episode is the
      // same random walk for every configuration sharing the seed.
      if (result.first_success_step < 0 && stats.episode_return > 0.0 &&
          !stats.random_policy) {
        result.first_success_step = env_steps_;
      }

      int n_updates = t.updates_per_episode > 0 ? t.updates_per_episode
                                                : stats.decisions;
      UpdateRecord mean;
      int done_updates = 0;
      if (env_steps_ >= t.seed_steps && buffer_.size() >= min_buffer_size()) {
        for (int u = 0; u < n_updates; ++u) {
          const auto rec = update();
          mean.loss_q += rec.loss_q;
          mean.loss_reward += rec.loss_reward;
          mean.loss_consistency += rec.loss_consistency;
          mean.loss_policy += rec.loss_policy;
          mean.loss_inverse += rec.loss_inverse;
          mean.loss_contrastive += rec.loss_contrastive;
          mean.intrinsic_mean += rec.intrinsic_mean;
          ++done_updates;
        }
      }
      if (done_updates > 0) {
        const double inv = 1.0 / done_updates;
        mean.loss_q *= inv;
        mean.loss_reward *= inv;
        mean.loss_consistency *= inv;
        mean.loss_policy *= inv;
        mean.loss_inverse *= inv;
        mean.loss_contrastive *= inv;
        mean.intrinsic_mean *= inv;
      }

      MetricsRow row;
      row.env_step = env_steps_;
      row.event = "train";
      row.episode_return = stats.episode_return;
      row.loss_q = mean.loss_q;
      row.loss_reward = mean.loss_reward;
      row.loss_consistency = mean.loss_consistency;
      row.loss_policy = mean.loss_policy;
      row.loss_inverse = mean.loss_inverse;
      row.loss_contrastive = mean.loss_contrastive;
      row.intrinsic_mean = mean.intrinsic_mean;
      row.elite_score_mean = stats.elite_score_mean;
      row.wall_clock_s = elapsed_seconds();
      write_row(row);

      while (next_eval <= env_steps_) {
        const double eval_return = evaluate(eval_index);
        result.eval_returns.push_back(eval_return);
        result.eval_steps.push_back(next_eval);
        MetricsRow eval_row;
        eval_row.env_step = next_eval;
        eval_row.event = "eval";
        eval_row.episode_return = eval_return;
        eval_row.wall_clock_s = elapsed_seconds();
        write_row(eval_row);
        if (!setup_.checkpoint_stem.empty()) {
          nn::save_checkpoint(params_, setup_.checkpoint_stem + "_" +
                                           std::to_string(next_eval));
        }
        next_eval += t.eval_every;
        ++eval_index;
      }
    }
  } catch (const NonFiniteError& e) {
    std::fprintf(stderr,
                 "ccem: non-finite abort at env_step %lld after %lld updates: %s"
                 " (first bad segment: %s)\n",
                 static_cast<long long>(env_steps_),
                 static_cast<long long>(updates_done_), e.what(),
                 params_.first_non_finite_segment().c_str());
    throw;
  }

  result.env_steps = env_steps_;
  result.clamp_warnings = env_->clamp_warnings();
  if (!result.eval_returns.empty()) {
    result.final_eval_return = result.eval_returns.back();
  }
  return result;
}

}  // namespace ccem::train
