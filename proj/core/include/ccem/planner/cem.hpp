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

#ifndef CCEM_PLANNER_CEM_HPP_
#define CCEM_PLANNER_CEM_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ccem/nn/param_vector.hpp"
#include "ccem/nn/rng.hpp"
#include "ccem/told/model.hpp"

namespace ccem::planner {

// How candidate sequences are scored. ValueSum and CuriosityValueSum share
// the same formula; they differ only in what the Q function was trained on.
enum class Scoring {
  kSumRewards,          // sum_t gamma^t R(z_t, a_t)
  kRewardsPlusTerminal, // rewards for t < H plus gamma^H Q(z_H, a_H)
  kValueSum,            // sum_t gamma^t Q(z_t, a_t)
  kCuriosityValueSum,   // same formula; Q trained on extrinsic + intrinsic
};

Scoring scoring_from_string(const std::string& name);
std::string to_string(Scoring scoring);

struct CemConfig {
  int horizon = 5;               // H; sequences hold H+1 actions
  int population = 512;
  int elites = 64;
  int iterations = 6;
  double gamma = 0.99;
  double policy_fraction = 0.05; // share of candidates rolled out by the policy
  double sigma_min = 0.05;
  Scoring scoring = Scoring::kCuriosityValueSum;
  bool soft_refit = false;       // exponential score weighting instead of top-k mean
  double soft_temperature = 0.5;
  bool warm_start = false;       // time-shift the previous mean instead of zeros

  void validate(int action_dim) const;
};

// Time-dependent diagonal Gaussian over action sequences.
struct PlanDistribution {
  std::vector<std::vector<double>> mu;     // (H+1) x d_a
  std::vector<std::vector<double>> sigma;  // (H+1) x d_a, >= sigma_min
};

// One candidate: H+1 actions, each clamped to [-1, 1].
struct ActionSequence {
  std::vector<std::vector<double>> actions;
};

struct IterationDiagnostics {
  double elite_mean = 0.0;
  double elite_max = 0.0;
};

struct PlanResult {
  std::vector<double> action;  // mu_0 of the final distribution
  PlanDistribution dist;
  std::vector<IterationDiagnostics> iterations;
};

using SequenceScorer = std::function<double(const ActionSequence&)>;

// Scores one sequence from initial latent z0, rolling latents forward with
// the learned dynamics. Any non-finite term scores the whole sequence -inf
// so it cannot be selected as an elite.
double score_sequence(const told::ToldModel& told, const nn::ParamVector& params,
                      std::span<const double> z0, const ActionSequence& seq,
                      const CemConfig& cfg);

// Full planning step from an observation: encode, then iterate sampling /
// scoring / elite refitting, and return the final mean's first action. The
// sampling distribution starts at zero mean and unit variance each call
// unless cfg.warm_start is set and `prev` is given (then the previous mean is
// shifted one step). Throws DegenerateModelError when every candidate scores
// -inf.
PlanResult plan(const told::ToldModel& told, const nn::ParamVector& params,
                const CemConfig& cfg, std::span<const double> observation,
                nn::Rng& rng, const PlanDistribution* prev = nullptr);

// Same loop against an injected scorer (no model). The policy fraction is
// not applicable without a model; all candidates are Gaussian samples.
PlanResult plan_with_scorer(const CemConfig& cfg, int action_dim,
                            const SequenceScorer& scorer, nn::Rng& rng,
                            const PlanDistribution* prev = nullptr);

}  // namespace ccem::planner

#endif  // CCEM_PLANNER_CEM_HPP_
