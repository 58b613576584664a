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

#include "ccem/planner/cem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ccem/error.hpp"

namespace ccem::planner {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Scoring scoring_from_string(const std::string& name) {
  if (name == "sum_rewards") return Scoring::kSumRewards;
  if (name == "rewards_plus_terminal") return Scoring::kRewardsPlusTerminal;
  if (name == "value_sum") return Scoring::kValueSum;
  if (name == "curiosity_value_sum") return Scoring::kCuriosityValueSum;
  throw ConfigError("unknown scoring '" + name + "'");
}

std::string to_string(Scoring scoring) {
  switch (scoring) {
    case Scoring::kSumRewards: return "sum_rewards";
    case Scoring::kRewardsPlusTerminal: return "rewards_plus_terminal";
    case Scoring::kValueSum: return "value_sum";
    case Scoring::kCuriosityValueSum: return "curiosity_value_sum";
  }
  throw ConfigError("unknown scoring enum value");
}

void CemConfig::validate(int action_dim) const {
  if (action_dim < 1) throw ConfigError("CemConfig: action_dim < 1");
  if (horizon < 0) throw ConfigError("CemConfig: horizon must be >= 0");
  if (population < 1) throw ConfigError("CemConfig: population must be >= 1");
  if (elites < 1 || elites > population) {
    throw ConfigError("CemConfig: need 1 <= elites <= population");
  }
  if (iterations < 1) throw ConfigError("CemConfig: iterations must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("CemConfig: gamma must be in [0, 1]");
  }
  if (!(policy_fraction >= 0.0 && policy_fraction <= 1.0)) {
    throw ConfigError("CemConfig: policy_fraction must be in [0, 1]");
  }
  if (!(sigma_min > 0.0)) throw ConfigError("CemConfig: sigma_min must be > 0");
  if (soft_refit && !(soft_temperature > 0.0)) {
    throw ConfigError("CemConfig: soft_temperature must be > 0");
  }
}

double score_sequence(const told::ToldModel& told, const nn::ParamVector& params,
                      std::span<const double> z0, const ActionSequence& seq,
                      const CemConfig& cfg) {
  const int h = cfg.horizon;
  if (static_cast<int>(seq.actions.size()) != h + 1) {
    throw DimensionError("score_sequence: expected " + std::to_string(h + 1) +
                         " actions, got " + std::to_string(seq.actions.size()));
  }
  std::vector<double> z(z0.begin(), z0.end());
  double score = 0.0;
  double g = 1.0;
  for (int t = 0; t <= h; ++t) {
    const auto& a = seq.actions[static_cast<std::size_t>(t)];
    double term = 0.0;
    switch (cfg.scoring) {
      case Scoring::kSumRewards:
        term = told.predict_reward(params, z, a);
        break;
      case Scoring::kRewardsPlusTerminal:
        term = t < h ? told.predict_reward(params, z, a)
                     : told.predict_q(params, z, a, /*use_target=*/false);
        break;
      case Scoring::kValueSum:
      case Scoring::kCuriosityValueSum:
        term = told.predict_q(params, z, a, /*use_target=*/false);
        break;
    }
    if (!std::isfinite(term)) return kNegInf;
    score += g * term;
    g *= cfg.gamma;
    if (t < h) z = told.dynamics_step(params, z, a);
  }
  return std::isfinite(score) ? score : kNegInf;
}

namespace {

// Generates `count` candidates by rolling the policy through the dynamics.
using PolicyGenerator =
    std::function<void(int count, std::vector<ActionSequence>& out, nn::Rng& rng)>;

PlanDistribution initial_distribution(const CemConfig& cfg, int action_dim,
                                      const PlanDistribution* prev) {
  const std::size_t rows = static_cast<std::size_t>(cfg.horizon + 1);
  const std::size_t cols = static_cast<std::size_t>(action_dim);
  PlanDistribution dist;
  dist.mu.assign(rows, std::vector<double>(cols, 0.0));
  dist.sigma.assign(rows, std::vector<double>(cols, 1.0));
  if (cfg.warm_start && prev != nullptr && prev->mu.size() == rows &&
      !prev->mu.empty() && prev->mu[0].size() == cols) {
    for (std::size_t t = 0; t + 1 < rows; ++t) dist.mu[t] = prev->mu[t + 1];
  }
  return dist;
}

PlanResult run_cem(const CemConfig& cfg, int action_dim,
                   const SequenceScorer& scorer, const PolicyGenerator* policy_gen,
                   nn::Rng& rng, const PlanDistribution* prev) {
  cfg.validate(action_dim);
  const int n_policy =
      policy_gen != nullptr
          ? static_cast<int>(std::lround(cfg.population * cfg.policy_fraction))
          : 0;
  const int n_gauss = cfg.population - n_policy;
  const std::size_t rows = static_cast<std::size_t>(cfg.horizon + 1);
  const std::size_t cols = static_cast<std::size_t>(action_dim);

  PlanDistribution dist = initial_distribution(cfg, action_dim, prev);
  PlanResult result;
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<ActionSequence> candidates;
  std::vector<double> scores;
  std::vector<int> order;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    candidates.clear();
    candidates.reserve(static_cast<std::size_t>(cfg.population));
    // Gaussian candidates come first so constant-score elites reflect the
    // sampling distribution and tie-breaks are reproducible.
    for (int c = 0; c < n_gauss; ++c) {
      ActionSequence seq;
      seq.actions.assign(rows, std::vector<double>(cols, 0.0));
      for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t d = 0; d < cols; ++d) {
          const double a = dist.mu[t][d] + dist.sigma[t][d] * unit(rng);
          seq.actions[t][d] = std::clamp(a, -1.0, 1.0);
        }
      }
      candidates.push_back(std::move(seq));
    }
    if (n_policy > 0) (*policy_gen)(n_policy, candidates, rng);

    scores.resize(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double s = scorer(candidates[c]);
      scores[c] = std::isfinite(s) ? s : kNegInf;
    }

    order.resize(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)]) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
      }
      return a < b;
    });
    if (scores[static_cast<std::size_t>(order[0])] == kNegInf) {
      throw DegenerateModelError("plan: every candidate scored -inf");
    }
    int n_elite = std::min<int>(cfg.elites, static_cast<int>(candidates.size()));
    while (n_elite > 1 &&
           scores[static_cast<std::size_t>(order[static_cast<std::size_t>(n_elite - 1)])] ==
               kNegInf) {
      --n_elite;
    }

    // Elite weights: uniform for the classic refit, exponential in score for
    // the soft variant.
    std::vector<double> weights(static_cast<std::size_t>(n_elite), 1.0);
    if (cfg.soft_refit) {
      const double best = scores[static_cast<std::size_t>(order[0])];
      for (int e = 0; e < n_elite; ++e) {
        weights[static_cast<std::size_t>(e)] = std::exp(
            (scores[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])] - best) /
            cfg.soft_temperature);
      }
    }
    const double wsum =
        std::accumulate(weights.begin(), weights.end(), 0.0);

    IterationDiagnostics diag;
    diag.elite_max = scores[static_cast<std::size_t>(order[0])];
    double mean = 0.0;
    for (int e = 0; e < n_elite; ++e) {
      mean += scores[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])];
    }
    diag.elite_mean = mean / n_elite;
    result.iterations.push_back(diag);

    for (std::size_t t = 0; t < rows; ++t) {
      for (std::size_t d = 0; d < cols; ++d) {
        double m = 0.0;
        for (int e = 0; e < n_elite; ++e) {
          m += weights[static_cast<std::size_t>(e)] *
               candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]
                   .actions[t][d];
        }
        m /= wsum;
        double var = 0.0;
        for (int e = 0; e < n_elite; ++e) {
          const double diff =
              candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]
                  .actions[t][d] -
              m;
          var += weights[static_cast<std::size_t>(e)] * diff * diff;
        }
        var /= wsum;
        dist.mu[t][d] = m;
        dist.sigma[t][d] = std::max(std::sqrt(var), cfg.sigma_min);
      }
    }
  }

  result.action = dist.mu[0];
  for (double& a : result.action) a = std::clamp(a, -1.0, 1.0);
  result.dist = std::move(dist);
  return result;
}

}  // namespace

PlanResult plan(const told::ToldModel& told, const nn::ParamVector& params,
                const CemConfig& cfg, std::span<const double> observation,
                nn::Rng& rng, const PlanDistribution* prev) {
  const int action_dim = told.config().action_dim;
  const std::vector<double> z0 = told.encode(params, observation);

  SequenceScorer scorer = [&](const ActionSequence& seq) {
    return score_sequence(told, params, z0, seq, cfg);
  };
  // Policy candidates replan from z0 each iteration with sigma_min noise so
  // they stay diverse yet deterministic under the shared rng.
  PolicyGenerator policy_gen = [&](int count, std::vector<ActionSequence>& out,
                                   nn::Rng& gen_rng) {
    for (int c = 0; c < count; ++c) {
      ActionSequence seq;
      std::vector<double> z = z0;
      for (int t = 0; t <= cfg.horizon; ++t) {
        auto a = told.policy_action(params, z, cfg.sigma_min, &gen_rng);
        if (t < cfg.horizon) z = told.dynamics_step(params, z, a);
        seq.actions.push_back(std::move(a));
      }
      out.push_back(std::move(seq));
    }
  };
  return run_cem(cfg, action_dim, scorer, &policy_gen, rng, prev);
}

PlanResult plan_with_scorer(const CemConfig& cfg, int action_dim,
                            const SequenceScorer& scorer, nn::Rng& rng,
                            const PlanDistribution* prev) {
  return run_cem(cfg, action_dim, scorer, nullptr, rng, prev);
}

}  // namespace ccem::planner
