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

#include "ccem/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string_view>

#include "ccem/nn/adam.hpp"
#include "ccem/nn/grad_check.hpp"
#include "ccem/planner/cem.hpp"
#include "ccem/told/losses.hpp"

namespace ccem::checks {
namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::vector<double> rand_vec(nn::Rng& rng, int n, double lo = -1.0,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = u(rng);
  return v;
}

std::string format_detail(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

bool segment_all_zero(const nn::ParamVector& grad, std::string_view name) {
  for (double g : grad.seg(name)) {
    if (g != 0.0) return false;
  }
  return true;
}

bool segment_any_nonzero(const nn::ParamVector& grad,
                         const std::vector<std::string>& names) {
  for (const auto& name : names) {
    for (double g : grad.seg(name)) {
      if (g != 0.0) return true;
    }
  }
  return false;
}

bool in_group(std::string_view name, const std::vector<std::string>& group) {
  return std::find(group.begin(), group.end(), name) != group.end();
}

}  // namespace

bool all_pass(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

told::ToldConfig small_told_config() {
  told::ToldConfig cfg;
  cfg.obs_dim = 5;
  cfg.latent_dim = 6;
  cfg.action_dim = 3;
  cfg.encoder_hidden = 16;
  cfg.encoder_layers = 1;
  cfg.head_hidden = 16;
  cfg.head_layers = 1;
  return cfg;
}

curiosity::IcmConfig small_icm_config() {
  curiosity::IcmConfig cfg;
  cfg.latent_dim = 6;
  cfg.action_dim = 3;
  cfg.action_latent_dim = 4;
  cfg.inverse_hidden = 12;
  cfg.inverse_layers = 1;
  cfg.action_hidden = 12;
  cfg.action_layers = 1;
  return cfg;
}

Rig make_rig(std::uint64_t seed, const told::ToldConfig& told_cfg,
             const curiosity::IcmConfig& icm_cfg) {
  Rig rig;
  rig.model = std::make_unique<told::ToldModel>(told_cfg);
  rig.icm = std::make_unique<curiosity::Icm>(icm_cfg);
  auto layout = std::make_shared<nn::ParamLayout>();
  rig.model->declare(*layout);
  rig.icm->declare(*layout);
  rig.layout = layout;
  rig.model->bind(*rig.layout);
  rig.icm->bind(*rig.layout);
  rig.params = nn::ParamVector(rig.layout);
  nn::Rng rng = nn::make_rng(seed, 1);
  rig.model->init_params(rig.params, rng);
  rig.icm->init_params(rig.params, rng);
  return rig;
}

Rig make_rig(std::uint64_t seed) {
  return make_rig(seed, small_told_config(), small_icm_config());
}

// ---------------------------------------------------------------------------
// Gradient suite
// ---------------------------------------------------------------------------

namespace {

// One randomized gradient-check instance: the parameter point, the analytic
// gradient computed there, and a deterministic loss closure for the
// finite-difference probe. The closure holds the rig alive and freezes the
// stop-gradient parameter copy.
struct FdInstance {
  nn::ParamVector at;
  nn::ParamVector grad;
  std::function<double(const nn::ParamVector&)> loss;
};

using InstanceMaker = std::function<FdInstance(std::uint64_t)>;

FdInstance make_td_value_instance(std::uint64_t seed) {
  auto rig = std::make_shared<Rig>(make_rig(seed));
  const auto& cfg = rig->model->config();
  nn::Rng d = nn::make_rng(seed, 7);
  auto z = rand_vec(d, cfg.latent_dim);
  auto a = rand_vec(d, cfg.action_dim);
  auto zn = rand_vec(d, cfg.latent_dim);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double r_e = u(d);
  double r_i = 0.5 * std::abs(u(d));
  double gamma = 0.9;
  nn::ParamVector frozen = rig->params;
  FdInstance ins;
  ins.at = rig->params;
  ins.grad = nn::ParamVector(rig->layout);
  told::q_loss(*rig->model, rig->params, frozen, z, a, r_e, r_i, zn, gamma,
               1.0, &ins.grad);
  ins.loss = [rig, frozen, z, a, r_e, r_i, zn,
              gamma](const nn::ParamVector& p) {
    return told::q_loss(*rig->model, p, frozen, z, a, r_e, r_i, zn, gamma, 1.0,
                        nullptr)
        .value;
  };
  return ins;
}

FdInstance make_policy_instance(std::uint64_t seed) {
  auto rig = std::make_shared<Rig>(make_rig(seed));
  nn::Rng d = nn::make_rng(seed, 7);
  auto z = rand_vec(d, rig->model->config().latent_dim);
  nn::ParamVector frozen = rig->params;
  FdInstance ins;
  ins.at = rig->params;
  ins.grad = nn::ParamVector(rig->layout);
  told::policy_loss(*rig->model, rig->params, frozen, z, 1.0, &ins.grad);
  ins.loss = [rig, frozen, z](const nn::ParamVector& p) {
    return told::policy_loss(*rig->model, p, frozen, z, 1.0, nullptr).value;
  };
  return ins;
}

FdInstance make_reward_instance(std::uint64_t seed) {
  auto rig = std::make_shared<Rig>(make_rig(seed));
  const auto& cfg = rig->model->config();
  nn::Rng d = nn::make_rng(seed, 7);
  auto z = rand_vec(d, cfg.latent_dim);
  auto a = rand_vec(d, cfg.action_dim);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double r_e = u(d);
  FdInstance ins;
  ins.at = rig->params;
  ins.grad = nn::ParamVector(rig->layout);
  told::reward_loss(*rig->model, rig->params, z, a, r_e, 1.0, &ins.grad);
  ins.loss = [rig, z, a, r_e](const nn::ParamVector& p) {
    return told::reward_loss(*rig->model, p, z, a, r_e, 1.0, nullptr).value;
  };
  return ins;
}

FdInstance make_consistency_instance(std::uint64_t seed) {
  auto rig = std::make_shared<Rig>(make_rig(seed));
  const auto& cfg = rig->model->config();
  nn::Rng d = nn::make_rng(seed, 7);
  auto z = rand_vec(d, cfg.latent_dim);
  auto a = rand_vec(d, cfg.action_dim);
  auto o_next = rand_vec(d, cfg.obs_dim);
  nn::ParamVector frozen = rig->params;
  FdInstance ins;
  ins.at = rig->params;
  ins.grad = nn::ParamVector(rig->layout);
  told::consistency_loss(*rig->model, rig->params, frozen, z, a, o_next, 1.0,
                         &ins.grad);
  ins.loss = [rig, frozen, z, a, o_next](const nn::ParamVector& p) {
    return told::consistency_loss(*rig->model, p, frozen, z, a, o_next, 1.0,
                                  nullptr)
        .value;
  };
  return ins;
}

told::Trajectory random_trajectory(nn::Rng& d, int steps, int obs_dim,
                                   int action_dim) {
  told::Trajectory traj;
  for (int i = 0; i <= steps; ++i) {
    traj.observations.push_back(rand_vec(d, obs_dim));
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < steps; ++i) {
    traj.actions.push_back(rand_vec(d, action_dim));
    traj.rewards.push_back(u(d));
  }
  return traj;
}

FdInstance make_model_objective_instance(std::uint64_t seed) {
  auto rig = std::make_shared<Rig>(make_rig(seed));
  const auto& cfg = rig->model->config();
  nn::Rng d = nn::make_rng(seed, 7);
  const int steps = 3;
  told::Trajectory traj =
      random_trajectory(d, steps, cfg.obs_dim, cfg.action_dim);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<double> intrinsic(steps);
  for (double& r : intrinsic) r = u(d);
  told::LossWeights weights;
  nn::ParamVector frozen = rig->params;
  FdInstance ins;
  ins.at = rig->params;
  ins.grad = nn::ParamVector(rig->layout);
  told::told_objective(*rig->model, rig->params, frozen, traj, intrinsic,
                       weights, &ins.grad);
  ins.loss = [rig, frozen, traj, intrinsic,
              weights](const nn::ParamVector& p) {
    return told::told_objective(*rig->model, p, frozen, traj, intrinsic,
                                weights, nullptr)
        .total;
  };
  return ins;
}

FdInstance make_inverse_step_instance(std::uint64_t seed) {
  auto rig = std::make_shared<Rig>(make_rig(seed));
  const auto& cfg = rig->model->config();
  nn::Rng d = nn::make_rng(seed, 7);
  auto o_t = rand_vec(d, cfg.obs_dim);
  auto o_next = rand_vec(d, cfg.obs_dim);
  auto a = rand_vec(d, cfg.action_dim);
  FdInstance ins;
  ins.at = rig->params;
  ins.grad = nn::ParamVector(rig->layout);
  rig->icm->inverse_loss(*rig->model, rig->params, o_t, o_next, a, 1.0,
                         &ins.grad);
  ins.loss = [rig, o_t, o_next, a](const nn::ParamVector& p) {
    return rig->icm->inverse_loss(*rig->model, p, o_t, o_next, a, 1.0,
                                  nullptr);
  };
  return ins;
}

FdInstance make_inverse_rollout_instance(std::uint64_t seed) {
  auto rig = std::make_shared<Rig>(make_rig(seed));
  const auto& cfg = rig->model->config();
  nn::Rng d = nn::make_rng(seed, 7);
  const int steps = 3;
  told::Trajectory traj =
      random_trajectory(d, steps, cfg.obs_dim, cfg.action_dim);
  FdInstance ins;
  ins.at = rig->params;
  ins.grad = nn::ParamVector(rig->layout);
  for (int j = 0; j < steps; ++j) {
    rig->icm->inverse_loss(*rig->model, rig->params, traj.observations[j],
                           traj.observations[j + 1], traj.actions[j], 1.0,
                           &ins.grad);
  }
  ins.loss = [rig, traj, steps](const nn::ParamVector& p) {
    double total = 0.0;
    for (int j = 0; j < steps; ++j) {
      total += rig->icm->inverse_loss(*rig->model, p, traj.observations[j],
                                      traj.observations[j + 1],
                                      traj.actions[j], 1.0, nullptr);
    }
    return total;
  };
  return ins;
}

FdInstance make_contrastive_instance(std::uint64_t seed) {
  auto rig = std::make_shared<Rig>(make_rig(seed));
  const auto& cfg = rig->model->config();
  nn::Rng d = nn::make_rng(seed, 7);
  const int batch = 6;
  std::vector<std::vector<double>> obs, actions, next_obs;
  for (int i = 0; i < batch; ++i) {
    obs.push_back(rand_vec(d, cfg.obs_dim));
    actions.push_back(rand_vec(d, cfg.action_dim));
    next_obs.push_back(rand_vec(d, cfg.obs_dim));
  }
  nn::ParamVector frozen = rig->params;
  FdInstance ins;
  ins.at = rig->params;
  ins.grad = nn::ParamVector(rig->layout);
  rig->icm->temporal_contrastive_loss(*rig->model, rig->params, frozen, obs,
                                      actions, next_obs, 1.0, &ins.grad);
  ins.loss = [rig, frozen, obs, actions, next_obs](const nn::ParamVector& p) {
    return rig->icm->temporal_contrastive_loss(*rig->model, p, frozen, obs,
                                               actions, next_obs, 1.0,
                                               nullptr);
  };
  return ins;
}

CheckResult run_fd_family(const std::string& name, const InstanceMaker& make,
                          std::uint64_t seed, int instances) {
  CheckResult result;
  result.name = name;
  double worst = 0.0;
  std::string worst_segment = "-";
  std::size_t entries = 0;
  bool pass = true;
  double t0 = now_s();
  for (int i = 0; i < instances; ++i) {
    FdInstance ins = make(nn::mix_seed(seed, 0x9000u + static_cast<unsigned>(i)));
    nn::GradCheckReport report = nn::finite_diff_check(ins.loss, ins.at, ins.grad);
    entries += report.entries_checked;
    if (report.max_rel_error > worst) {
      worst = report.max_rel_error;
      worst_segment = report.worst_segment.empty() ? "-" : report.worst_segment;
    }
    pass = pass && report.pass;
  }
  result.pass = pass;
  result.detail = format_detail(
      "instances=%d entries=%zu max_rel_err=%.3g worst=%s time=%.2fs",
      instances, entries, worst, worst_segment.c_str(), now_s() - t0);
  return result;
}

}  // namespace

std::vector<CheckResult> run_gradient_suite(std::uint64_t seed, int instances) {
  std::vector<CheckResult> results;
  results.push_back(run_fd_family("grad/td_value", make_td_value_instance,
                                  nn::mix_seed(seed, 11), instances));
  results.push_back(run_fd_family("grad/policy", make_policy_instance,
                                  nn::mix_seed(seed, 12), instances));
  results.push_back(run_fd_family("grad/reward", make_reward_instance,
                                  nn::mix_seed(seed, 13), instances));
  results.push_back(run_fd_family("grad/consistency", make_consistency_instance,
                                  nn::mix_seed(seed, 14), instances));
  results.push_back(run_fd_family("grad/model_objective",
                                  make_model_objective_instance,
                                  nn::mix_seed(seed, 15), instances));
  results.push_back(run_fd_family("grad/inverse_step",
                                  make_inverse_step_instance,
                                  nn::mix_seed(seed, 16), instances));
  results.push_back(run_fd_family("grad/inverse_rollout",
                                  make_inverse_rollout_instance,
                                  nn::mix_seed(seed, 17), instances));
  results.push_back(run_fd_family("grad/contrastive",
                                  make_contrastive_instance,
                                  nn::mix_seed(seed, 18), instances));
  return results;
}

// ---------------------------------------------------------------------------
// Stop-gradient suite
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_stop_gradient_suite(std::uint64_t seed,
                                                 int trials) {
  int target_fail = 0;
  int policy_fail = 0;
  int td_fail = 0;
  for (int t = 0; t < trials; ++t) {
    Rig rig = make_rig(nn::mix_seed(seed, 0xA000u + static_cast<unsigned>(t)));
    const auto& cfg = rig.model->config();
    nn::Rng d = nn::make_rng(seed, 0xB000u + static_cast<unsigned>(t));
    nn::ParamVector frozen = rig.params;
    const auto targets = rig.model->target_segments();
    const auto policy_group = rig.model->policy_segments();

    auto z = rand_vec(d, cfg.latent_dim);
    auto a = rand_vec(d, cfg.action_dim);
    auto zn = rand_vec(d, cfg.latent_dim);
    auto o_next = rand_vec(d, cfg.obs_dim);
    told::Trajectory traj = random_trajectory(d, 3, cfg.obs_dim, cfg.action_dim);
    std::vector<double> intrinsic = {0.1, 0.2, 0.3};
    std::vector<std::vector<double>> obs_b, act_b, next_b;
    for (int i = 0; i < 4; ++i) {
      obs_b.push_back(rand_vec(d, cfg.obs_dim));
      act_b.push_back(rand_vec(d, cfg.action_dim));
      next_b.push_back(rand_vec(d, cfg.obs_dim));
    }

    // Each loss in turn: gradient must never reach a target segment.
    std::vector<nn::ParamVector> grads;
    auto fresh = [&rig]() { return nn::ParamVector(rig.layout); };
    {
      auto g = fresh();
      told::q_loss(*rig.model, rig.params, frozen, z, a, 0.3, 0.1, zn, 0.9,
                   1.0, &g);
      grads.push_back(std::move(g));
    }
    {
      auto g = fresh();
      told::policy_loss(*rig.model, rig.params, frozen, z, 1.0, &g);
      grads.push_back(std::move(g));
    }
    {
      auto g = fresh();
      told::consistency_loss(*rig.model, rig.params, frozen, z, a, o_next, 1.0,
                             &g);
      grads.push_back(std::move(g));
    }
    {
      auto g = fresh();
      told::told_objective(*rig.model, rig.params, frozen, traj, intrinsic,
                           told::LossWeights{}, &g);
      grads.push_back(std::move(g));
    }
    {
      auto g = fresh();
      rig.icm->inverse_loss(*rig.model, rig.params, traj.observations[0],
                            traj.observations[1], traj.actions[0], 1.0, &g);
      grads.push_back(std::move(g));
    }
    {
      auto g = fresh();
      rig.icm->temporal_contrastive_loss(*rig.model, rig.params, frozen, obs_b,
                                         act_b, next_b, 1.0, &g);
      grads.push_back(std::move(g));
    }
    for (const auto& g : grads) {
      for (const auto& name : targets) {
        if (!segment_all_zero(g, name)) ++target_fail;
      }
    }

    // Policy objective: gradient confined to policy segments.
    {
      auto g = fresh();
      told::policy_loss(*rig.model, rig.params, frozen, z, 1.0, &g);
      bool ok = segment_any_nonzero(g, policy_group);
      for (const auto& seg : rig.layout->segments()) {
        if (in_group(seg.name, policy_group)) continue;
        if (!segment_all_zero(g, seg.name)) ok = false;
      }
      if (!ok) ++policy_fail;
    }

    // TD loss: the bootstrap target (policy + target Q on the next latent)
    // contributes nothing; only online Q segments may carry gradient.
    {
      auto g = fresh();
      told::q_loss(*rig.model, rig.params, frozen, z, a, 0.3, 0.1, zn, 0.9,
                   1.0, &g);
      const std::string q_prefix = rig.model->q_net(0).prefix() + "/";
      bool ok = true;
      bool any_q = false;
      for (const auto& seg : rig.layout->segments()) {
        bool is_q = seg.name.rfind(q_prefix, 0) == 0;
        if (rig.model->num_q_heads() > 1) {
          const std::string q2_prefix = rig.model->q_net(1).prefix() + "/";
          is_q = is_q || seg.name.rfind(q2_prefix, 0) == 0;
        }
        if (is_q) {
          any_q = true;
          continue;
        }
        if (!segment_all_zero(g, seg.name)) ok = false;
      }
      if (!ok || !any_q) ++td_fail;
    }
  }

  std::vector<CheckResult> results;
  results.push_back({"stopgrad/targets_all_losses", target_fail == 0,
                     format_detail("trials=%d violations=%d", trials,
                                   target_fail)});
  results.push_back({"stopgrad/policy_objective_scope", policy_fail == 0,
                     format_detail("trials=%d violations=%d", trials,
                                   policy_fail)});
  results.push_back({"stopgrad/td_target_constant", td_fail == 0,
                     format_detail("trials=%d violations=%d", trials,
                                   td_fail)});
  return results;
}

// ---------------------------------------------------------------------------
// Planner oracles
// ---------------------------------------------------------------------------

CheckResult run_cem_grid_recovery(std::uint64_t seed, int trials) {
  CheckResult result;
  result.name = "cem/grid_argmax_recovery";
  planner::CemConfig cfg;
  cfg.horizon = 0;
  cfg.population = 512;
  cfg.elites = 64;
  cfg.iterations = 6;
  cfg.sigma_min = 0.05;
  double worst_gap = 0.0;
  int failures = 0;
  double t0 = now_s();
  for (int t = 0; t < trials; ++t) {
    nn::Rng data = nn::make_rng(seed, 200 + static_cast<unsigned>(t));
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    const double ax = u(data);
    const double ay = u(data);
    auto score = [ax, ay](const planner::ActionSequence& seq) {
      const auto& a = seq.actions[0];
      const double dx = a[0] - ax;
      const double dy = a[1] - ay;
      return -(dx * dx + dy * dy);
    };
    // 101x101 grid oracle over [-1, 1]^2.
    double best = -1e300;
    double gx = 0.0, gy = 0.0;
    planner::ActionSequence probe;
    probe.actions.assign(1, std::vector<double>(2, 0.0));
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) {
        probe.actions[0][0] = -1.0 + 0.02 * i;
        probe.actions[0][1] = -1.0 + 0.02 * j;
        double s = score(probe);
        if (s > best) {
          best = s;
          gx = probe.actions[0][0];
          gy = probe.actions[0][1];
        }
      }
    }
    nn::Rng plan_rng = nn::make_rng(seed, 300 + static_cast<unsigned>(t));
    planner::PlanResult plan = planner::plan_with_scorer(cfg, 2, score, plan_rng);
    const double gap = std::max(std::abs(plan.action[0] - gx),
                                std::abs(plan.action[1] - gy));
    worst_gap = std::max(worst_gap, gap);
    if (gap > 0.05) ++failures;
  }
  result.pass = failures == 0;
  result.detail = format_detail(
      "trials=%d failures=%d worst_linf=%.4f tol=0.05 time=%.2fs", trials,
      failures, worst_gap, now_s() - t0);
  return result;
}

namespace {

// Toy linear latent model used by the multi-step planning oracle: z' = Az+Ba,
// per-step score offset chosen so every reachable score is positive and the
// 0.95x optimality ratio is well defined.
struct ToyModel {
  double A[2][2];
  double B[2][2];
  double goal[2];
  double z0[2];

  double score(const planner::ActionSequence& seq, int steps) const {
    double z[2] = {z0[0], z0[1]};
    double total = 0.0;
    for (int t = 0; t < steps; ++t) {
      const auto& a = seq.actions[static_cast<std::size_t>(t)];
      const double nx = A[0][0] * z[0] + A[0][1] * z[1] + B[0][0] * a[0] + B[0][1] * a[1];
      const double ny = A[1][0] * z[0] + A[1][1] * z[1] + B[1][0] * a[0] + B[1][1] * a[1];
      z[0] = nx;
      z[1] = ny;
      const double dx = z[0] - goal[0];
      const double dy = z[1] - goal[1];
      total += 26.0 - (dx * dx + dy * dy);
    }
    return total;
  }
};

ToyModel random_toy(nn::Rng& rng) {
  ToyModel toy;
  std::uniform_real_distribution<double> ua(-0.35, 0.35);
  std::uniform_real_distribution<double> ub(-0.8, 0.8);
  std::uniform_real_distribution<double> ug(-0.5, 0.5);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      toy.A[i][j] = ua(rng);
      toy.B[i][j] = ub(rng);
    }
  }
  toy.goal[0] = ug(rng);
  toy.goal[1] = ug(rng);
  toy.z0[0] = ug(rng);
  toy.z0[1] = ug(rng);
  return toy;
}

}  // namespace

CheckResult run_cem_toy_model(std::uint64_t seed, int trials) {
  CheckResult result;
  result.name = "cem/toy_model_near_optimality";
  planner::CemConfig cfg;
  cfg.horizon = 1;  // two planned actions
  cfg.population = 512;
  cfg.elites = 64;
  cfg.iterations = 6;
  cfg.sigma_min = 0.05;
  const int steps = cfg.horizon + 1;
  const double grid[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  int successes = 0;
  double worst_ratio = 1e300;
  double t0 = now_s();
  for (int t = 0; t < trials; ++t) {
    nn::Rng data = nn::make_rng(seed, 500 + static_cast<unsigned>(t));
    ToyModel toy = random_toy(data);
    auto score = [&toy, steps](const planner::ActionSequence& seq) {
      return toy.score(seq, steps);
    };
    // Exhaustive search over 5 points per action dim (4 dims total).
    double best = -1e300;
    planner::ActionSequence probe;
    probe.actions.assign(static_cast<std::size_t>(steps),
                         std::vector<double>(2, 0.0));
    for (int i0 = 0; i0 < 5; ++i0) {
      for (int j0 = 0; j0 < 5; ++j0) {
        for (int i1 = 0; i1 < 5; ++i1) {
          for (int j1 = 0; j1 < 5; ++j1) {
            probe.actions[0][0] = grid[i0];
            probe.actions[0][1] = grid[j0];
            probe.actions[1][0] = grid[i1];
            probe.actions[1][1] = grid[j1];
            best = std::max(best, score(probe));
          }
        }
      }
    }
    nn::Rng plan_rng = nn::make_rng(seed, 600 + static_cast<unsigned>(t));
    planner::PlanResult plan = planner::plan_with_scorer(cfg, 2, score, plan_rng);
    planner::ActionSequence mean_seq;
    mean_seq.actions = plan.dist.mu;
    const double cem_score = score(mean_seq);
    const double ratio = cem_score / best;
    worst_ratio = std::min(worst_ratio, ratio);
    if (cem_score >= 0.95 * best) ++successes;
  }
  result.pass = successes >= 18;
  result.detail = format_detail(
      "trials=%d successes=%d required=18 worst_ratio=%.4f time=%.2fs", trials,
      successes, worst_ratio, now_s() - t0);
  return result;
}

// ---------------------------------------------------------------------------
// Intrinsic reward law
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_intrinsic_law(std::uint64_t seed) {
  std::vector<CheckResult> results;
  const double tol = 1e-9;

  {
    // Zeroed dynamics net predicts the zero vector; z_next = 0 makes the
    // prediction exact, so the reward must be exactly zero.
    Rig rig = make_rig(nn::mix_seed(seed, 1));
    const auto& cfg = rig.model->config();
    const std::string dyn_prefix = rig.model->dynamics_net().prefix() + "/";
    for (const auto& seg : rig.layout->segments()) {
      if (seg.name.rfind(dyn_prefix, 0) == 0) {
        auto s = rig.params.seg(seg.name);
        std::fill(s.begin(), s.end(), 0.0);
      }
    }
    nn::Rng d = nn::make_rng(seed, 21);
    auto z = rand_vec(d, cfg.latent_dim);
    auto a = rand_vec(d, cfg.action_dim);
    std::vector<double> zn(static_cast<std::size_t>(cfg.latent_dim), 0.0);
    curiosity::IntrinsicConfig ic;
    double r = curiosity::intrinsic_reward(*rig.model, rig.params, ic, z, a,
                                           zn, 1234);
    results.push_back({"intrinsic/zero_at_exact_prediction",
                       std::abs(r) <= tol,
                       format_detail("reward=%.3g tol=%.0e", r, tol)});
  }

  Rig rig = make_rig(nn::mix_seed(seed, 2));
  const auto& cfg = rig.model->config();
  nn::Rng d = nn::make_rng(seed, 22);
  auto z = rand_vec(d, cfg.latent_dim);
  auto a = rand_vec(d, cfg.action_dim);
  auto zn = rand_vec(d, cfg.latent_dim);

  {
    curiosity::IntrinsicConfig ic;
    ic.alpha = 1e-5;
    ic.r_i_max = 1e6;  // far above any reachable error, so no running update
    curiosity::IntrinsicConfig ic2 = ic;
    double r0 = curiosity::intrinsic_reward(*rig.model, rig.params, ic, z, a,
                                            zn, 0);
    double r1 = curiosity::intrinsic_reward(*rig.model, rig.params, ic2, z, a,
                                            zn, 100000);
    double ratio = r0 / r1;
    double err = std::abs(ratio - std::exp(1.0));
    results.push_back({"intrinsic/unit_window_decay_ratio_e", err <= tol,
                       format_detail("ratio=%.12f err=%.3g tol=%.0e", ratio,
                                     err, tol)});
  }

  {
    curiosity::IntrinsicConfig ic1;
    ic1.C = 0.2;
    ic1.r_i_max = 1e6;
    curiosity::IntrinsicConfig ic2 = ic1;
    ic2.C = 0.4;
    double r1 = curiosity::intrinsic_reward(*rig.model, rig.params, ic1, z, a,
                                            zn, 50);
    double r2 = curiosity::intrinsic_reward(*rig.model, rig.params, ic2, z, a,
                                            zn, 50);
    double err = std::abs(r2 / r1 - 2.0);
    results.push_back({"intrinsic/linear_in_weight", err <= tol,
                       format_detail("ratio=%.12f err=%.3g tol=%.0e", r2 / r1,
                                     err, tol)});
  }

  {
    curiosity::IntrinsicConfig base;
    base.r_e_max = 1.0;
    base.r_i_max = 1e6;
    curiosity::IntrinsicConfig tripled = base;
    tripled.r_e_max = 3.0;
    curiosity::IntrinsicConfig halved_ratio = base;
    halved_ratio.r_i_max = 2e6;
    double rb = curiosity::intrinsic_reward(*rig.model, rig.params, base, z, a,
                                            zn, 50);
    double rt = curiosity::intrinsic_reward(*rig.model, rig.params, tripled, z,
                                            a, zn, 50);
    double rh = curiosity::intrinsic_reward(*rig.model, rig.params,
                                            halved_ratio, z, a, zn, 50);
    double err = std::max(std::abs(rt / rb - 3.0), std::abs(rb / rh - 2.0));
    results.push_back({"intrinsic/linear_in_normalization_ratio", err <= tol,
                       format_detail("err=%.3g tol=%.0e", err, tol)});
  }

  return results;
}

// ---------------------------------------------------------------------------
// InfoNCE identities
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_infonce_identities(std::uint64_t seed) {
  std::vector<CheckResult> results;

  {
    double worst = 0.0;
    for (int n : {2, 16, 256}) {
      std::vector<std::vector<double>> logits(
          static_cast<std::size_t>(n),
          std::vector<double>(static_cast<std::size_t>(n), 0.7));
      double loss = curiosity::infonce_from_logits(logits, nullptr);
      worst = std::max(worst, std::abs(loss - std::log(double(n))));
    }
    results.push_back({"infonce/uniform_logits_ln_n", worst <= 1e-6,
                       format_detail("worst_abs_err=%.3g tol=1e-06", worst)});
  }

  {
    nn::Rng d = nn::make_rng(seed, 31);
    std::vector<std::vector<double>> logits(4, std::vector<double>(4));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& row : logits) {
      for (double& x : row) x = u(d);
    }
    const double sweep[7] = {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 4.0};
    bool strict = true;
    double prev = 0.0;
    for (int i = 0; i < 7; ++i) {
      logits[0][0] = sweep[i];
      double loss = curiosity::infonce_from_logits(logits, nullptr);
      if (i > 0 && !(loss < prev)) strict = false;
      prev = loss;
    }
    results.push_back({"infonce/strictly_decreasing_in_positive", strict,
                       format_detail("sweep_points=7 strict=%s",
                                     strict ? "yes" : "no")});
  }

  {
    Rig rig = make_rig(nn::mix_seed(seed, 3));
    const auto& cfg = rig.model->config();
    auto w = rig.params.seg("contrastive/W");
    std::fill(w.begin(), w.end(), 0.0);
    nn::Rng d = nn::make_rng(seed, 32);
    const int batch = 16;
    std::vector<std::vector<double>> obs, actions, next_obs;
    for (int i = 0; i < batch; ++i) {
      obs.push_back(rand_vec(d, cfg.obs_dim));
      actions.push_back(rand_vec(d, cfg.action_dim));
      next_obs.push_back(rand_vec(d, cfg.obs_dim));
    }
    nn::ParamVector frozen = rig.params;
    double loss = rig.icm->temporal_contrastive_loss(
        *rig.model, rig.params, frozen, obs, actions, next_obs, 1.0, nullptr);
    double err = std::abs(loss - std::log(16.0));
    results.push_back({"infonce/full_path_zero_similarity", err <= 1e-6,
                       format_detail("abs_err=%.3g tol=1e-06", err)});
  }

  return results;
}

// ---------------------------------------------------------------------------
// EMA identity
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_ema_identity(std::uint64_t seed) {
  std::vector<CheckResult> results;

  {
    nn::Rng d = nn::make_rng(seed, 41);
    const int n = 257;
    std::vector<double> target = rand_vec(d, n, -3.0, 3.0);
    std::vector<double> online = rand_vec(d, n, -3.0, 3.0);
    bool ok = true;
    for (double zeta : {0.0, 0.01, 1.0}) {
      std::vector<double> t2 = target;
      nn::ema_update(t2, online, zeta);
      for (int i = 0; i < n; ++i) {
        const double expected =
            (1.0 - zeta) * target[static_cast<std::size_t>(i)] +
            zeta * online[static_cast<std::size_t>(i)];
        if (t2[static_cast<std::size_t>(i)] != expected) ok = false;
      }
      if (zeta == 0.0 && t2 != target) ok = false;
      if (zeta == 1.0) {
        for (int i = 0; i < n; ++i) {
          if (t2[static_cast<std::size_t>(i)] !=
              online[static_cast<std::size_t>(i)]) {
            ok = false;
          }
        }
      }
    }
    results.push_back({"ema/identity_zeta_values", ok,
                       "zeta in {0, 0.01, 1}, exact equality"});
  }

  {
    // Scoped application: only the intended target segments move, and they
    // move by exactly the identity.
    Rig rig = make_rig(nn::mix_seed(seed, 4));
    nn::ParamVector before = rig.params;
    nn::ParamVector p = rig.params;
    rig.model->ema_q_target(p, 0.01);
    bool ok = true;
    for (const auto& seg : rig.layout->segments()) {
      auto now = p.seg(seg.name);
      auto was = before.seg(seg.name);
      bool is_q_target = seg.name.rfind("target_q/", 0) == 0;
      if (!is_q_target) {
        for (std::size_t i = 0; i < now.size(); ++i) {
          if (now[i] != was[i]) ok = false;
        }
      }
    }
    const std::string online_prefix = rig.model->q_net(0).prefix() + "/";
    const std::string target_prefix = rig.model->target_q_net(0).prefix() + "/";
    for (const auto& seg : rig.layout->segments()) {
      if (seg.name.rfind(target_prefix, 0) != 0) continue;
      const std::string online_name =
          online_prefix + seg.name.substr(target_prefix.size());
      auto now = p.seg(seg.name);
      auto was = before.seg(seg.name);
      auto online = before.seg(online_name);
      for (std::size_t i = 0; i < now.size(); ++i) {
        const double expected = (1.0 - 0.01) * was[i] + 0.01 * online[i];
        if (now[i] != expected) ok = false;
      }
    }
    results.push_back({"ema/scoped_to_target_segments", ok,
                       "only target Q segments move, by the exact identity"});
  }

  return results;
}

// ---------------------------------------------------------------------------
// Scoring-variant structure
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_scoring_structure(std::uint64_t seed) {
  std::vector<CheckResult> results;
  Rig rig = make_rig(nn::mix_seed(seed, 5));
  const auto& mcfg = rig.model->config();
  nn::Rng d = nn::make_rng(seed, 51);

  {
    bool equal = true;
    for (int t = 0; t < 20; ++t) {
      auto obs = rand_vec(d, mcfg.obs_dim);
      auto z0 = rig.model->encode(rig.params, obs);
      planner::CemConfig cfg;
      cfg.horizon = 3;
      planner::ActionSequence seq;
      for (int i = 0; i <= cfg.horizon; ++i) {
        seq.actions.push_back(rand_vec(d, mcfg.action_dim));
      }
      cfg.scoring = planner::Scoring::kValueSum;
      double s1 = planner::score_sequence(*rig.model, rig.params, z0, seq, cfg);
      cfg.scoring = planner::Scoring::kCuriosityValueSum;
      double s2 = planner::score_sequence(*rig.model, rig.params, z0, seq, cfg);
      if (s1 != s2) equal = false;
    }
    results.push_back({"scoring/value_variants_bitwise", equal,
                       "20 random sequences, exact equality"});
  }

  {
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      auto obs = rand_vec(d, mcfg.obs_dim);
      auto z0 = rig.model->encode(rig.params, obs);
      planner::CemConfig cfg;
      cfg.horizon = 3;
      cfg.gamma = 0.0;
      planner::ActionSequence seq;
      for (int i = 0; i <= cfg.horizon; ++i) {
        seq.actions.push_back(rand_vec(d, mcfg.action_dim));
      }
      const double r0 =
          rig.model->predict_reward(rig.params, z0, seq.actions[0]);
      const double q0 =
          rig.model->predict_q(rig.params, z0, seq.actions[0], false);
      cfg.scoring = planner::Scoring::kSumRewards;
      if (planner::score_sequence(*rig.model, rig.params, z0, seq, cfg) != r0) {
        ok = false;
      }
      cfg.scoring = planner::Scoring::kRewardsPlusTerminal;
      if (planner::score_sequence(*rig.model, rig.params, z0, seq, cfg) != r0) {
        ok = false;
      }
      cfg.scoring = planner::Scoring::kValueSum;
      if (planner::score_sequence(*rig.model, rig.params, z0, seq, cfg) != q0) {
        ok = false;
      }
      cfg.scoring = planner::Scoring::kCuriosityValueSum;
      if (planner::score_sequence(*rig.model, rig.params, z0, seq, cfg) != q0) {
        ok = false;
      }

      // Horizon 0: the terminal variant is a pure value estimate.
      planner::CemConfig cfg0;
      cfg0.horizon = 0;
      cfg0.gamma = 0.0;
      cfg0.scoring = planner::Scoring::kRewardsPlusTerminal;
      planner::ActionSequence seq0;
      seq0.actions.push_back(seq.actions[0]);
      if (planner::score_sequence(*rig.model, rig.params, z0, seq0, cfg0) !=
          q0) {
        ok = false;
      }
    }
    results.push_back({"scoring/gamma_zero_first_term", ok,
                       "20 random states, all four variants"});
  }

  return results;
}

std::vector<CheckResult> run_all_fast(std::uint64_t seed) {
  std::vector<CheckResult> all;
  auto append = [&all](std::vector<CheckResult> v) {
    for (auto& r : v) all.push_back(std::move(r));
  };
  append(run_gradient_suite(seed));
  append(run_stop_gradient_suite(seed));
  all.push_back(run_cem_grid_recovery(seed));
  all.push_back(run_cem_toy_model(seed));
  append(run_intrinsic_law(seed));
  append(run_infonce_identities(seed));
  append(run_ema_identity(seed));
  append(run_scoring_structure(seed));
  return all;
}

}  // namespace ccem::checks
