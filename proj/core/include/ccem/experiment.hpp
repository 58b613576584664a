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

#ifndef CCEM_EXPERIMENT_HPP_
#define CCEM_EXPERIMENT_HPP_

#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "ccem/config.hpp"
#include "ccem/train/trainer.hpp"

namespace ccem::experiment {

struct SeedOutcome {
  std::uint64_t seed = 0;
  train::RunResult result;
  std::string metrics_path;
};

// Aggregate over the configured seeds. `median_first_success` is in env
// steps, with runs that never saw a positive return counted as +infinity.
// The standard deviation is the population form (divide by N).
struct TrainSummary {
  std::vector<SeedOutcome> outcomes;
  double mean_final = 0.0;
  double std_final = 0.0;
  double median_first_success = 0.0;
  std::string dir;
  std::string summary_path;
};

// Trains cfg.seeds runs (up to cfg.workers in parallel) under
// <cfg.out_dir>/<tag>/: per-seed metrics CSV and checkpoints, the resolved
// config, and summary.json.
TrainSummary run_train(const ExperimentConfig& cfg,
                       const std::string& tag = "train");

// Loads a checkpoint into a fresh trainer for cfg/seed and returns the mean
// evaluation return.
double run_eval(const ExperimentConfig& cfg, const std::string& checkpoint_stem,
                std::uint64_t seed);

// The four-variant ablation grid over the configured seeds. The ordering
// flag records mean(full) >= mean(non_contrastive) >= mean(baseline); the
// report is written regardless, with the flag included.
struct AblationReport {
  std::vector<std::pair<std::string, TrainSummary>> variants;
  bool ordering_holds = false;
  std::string report_path;
};

AblationReport run_ablate(const ExperimentConfig& cfg);

// Planner-versus-oracle benchmarks: per scoring variant, the gap between the
// planner's score and an exhaustive grid search under the same learned-model
// scorer, plus the synthetic-scorer recovery suites.
struct PlanBenchEntry {
  std::string scoring;
  double planner_score = 0.0;
  double oracle_score = 0.0;
  double mean_gap = 0.0;  // oracle - planner, averaged over trials
};

struct PlanBenchReport {
  std::vector<PlanBenchEntry> entries;
  bool grid_recovery_pass = false;
  bool toy_model_pass = false;
  std::string report_path;
};

PlanBenchReport run_plan_bench(const ExperimentConfig& cfg,
                               std::uint64_t seed = 0);

// Runs every fast oracle suite, printing one line per check to `out`.
// Returns the number of failing checks.
int run_oracle_check(std::uint64_t seed, std::FILE* out);

}  // namespace ccem::experiment

#endif  // CCEM_EXPERIMENT_HPP_
