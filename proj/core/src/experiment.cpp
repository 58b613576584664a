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

#include "ccem/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "ccem/checks.hpp"
#include "ccem/error.hpp"
#include "ccem/planner/cem.hpp"
#include "json.hpp"

namespace ccem::experiment {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

// Median with never-succeeded runs (+infinity) sorting last; an even count
// averages the two middle values, so any infinite middle makes the median
// infinite.
double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

json summary_json(const TrainSummary& summary) {
  json j;
  j["mean_final_return"] = summary.mean_final;
  j["std_final_return"] = summary.std_final;
  j["median_first_success_step"] =
      std::isfinite(summary.median_first_success)
          ? json(summary.median_first_success)
          : json(nullptr);
  json seeds = json::array();
  for (const auto& o : summary.outcomes) {
    json s;
    s["seed"] = o.seed;
    s["final_eval_return"] = o.result.final_eval_return;
    s["first_success_step"] = o.result.first_success_step;
    s["eval_steps"] = o.result.eval_steps;
    s["eval_returns"] = o.result.eval_returns;
    s["env_steps"] = o.result.env_steps;
    s["clamp_warnings"] = o.result.clamp_warnings;
    s["metrics_csv"] = o.metrics_path;
    seeds.push_back(std::move(s));
  }
  j["seeds"] = std::move(seeds);
  return j;
}

}  // namespace

TrainSummary run_train(const ExperimentConfig& cfg, const std::string& tag) {
  ExperimentConfig resolved = cfg;
  resolved.finalize();
  const fs::path dir = fs::path(resolved.out_dir) / tag;
  fs::create_directories(dir);
  write_text_file(dir / "config.json", resolved.to_json_text());

  const std::size_t n = resolved.seeds.size();
  std::vector<SeedOutcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;

  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const std::uint64_t seed = resolved.seeds[i];
        const std::string stem =
            (dir / ("seed_" + std::to_string(seed))).string();
        train::Trainer trainer(
            resolved.make_setup(seed, stem + ".csv", stem));
        SeedOutcome out;
        out.seed = seed;
        out.metrics_path = stem + ".csv";
        out.result = trainer.run();
        outcomes[i] = std::move(out);
      } catch (...) {
        std::scoped_lock lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };

  const std::size_t pool_size = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(resolved.workers, 1)), n);
  if (pool_size <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(pool_size);
    for (std::size_t w = 0; w < pool_size; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);

  TrainSummary summary;
  summary.outcomes = std::move(outcomes);
  summary.dir = dir.string();
  double mean = 0.0;
  std::vector<double> first_success;
  for (const auto& o : summary.outcomes) {
    mean += o.result.final_eval_return;
    first_success.push_back(
        o.result.first_success_step < 0
            ? std::numeric_limits<double>::infinity()
            : static_cast<double>(o.result.first_success_step));
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const auto& o : summary.outcomes) {
    const double d = o.result.final_eval_return - mean;
    var += d * d;
  }
  summary.mean_final = mean;
  summary.std_final = std::sqrt(var / static_cast<double>(n));
  summary.median_first_success = median_of(std::move(first_success));

  const fs::path summary_path = dir / "summary.json";
  write_text_file(summary_path, summary_json(summary).dump(2) + "\n");
  summary.summary_path = summary_path.string();
  return summary;
}

double run_eval(const ExperimentConfig& cfg, const std::string& checkpoint_stem,
                std::uint64_t seed) {
  ExperimentConfig resolved = cfg;
  resolved.finalize();
  train::Trainer trainer(resolved.make_setup(seed));
  nn::load_checkpoint(trainer.mutable_params(), checkpoint_stem);
  return trainer.evaluate(0);
}

AblationReport run_ablate(const ExperimentConfig& cfg) {
  struct Variant {
    const char* name;
    planner::Scoring scoring;
    bool non_ccem;
    bool non_contrastive;
  };
  const Variant grid[4] = {
      {"full", planner::Scoring::kCuriosityValueSum, false, false},
      {"non_contrastive", planner::Scoring::kCuriosityValueSum, false, true},
      {"non_ccem", planner::Scoring::kValueSum, true, false},
      {"baseline", planner::Scoring::kValueSum, true, true},
  };

  AblationReport report;
  for (const Variant& v : grid) {
    ExperimentConfig variant_cfg = cfg;
    variant_cfg.cem.scoring = v.scoring;
    variant_cfg.train.non_ccem = v.non_ccem;
    variant_cfg.train.non_contrastive = v.non_contrastive;
    variant_cfg.finalize();
    report.variants.emplace_back(
        v.name, run_train(variant_cfg, std::string("ablate/") + v.name));
  }

  auto mean_of = [&report](const char* name) {
    for (const auto& [n, s] : report.variants) {
      if (n == name) return s.mean_final;
    }
    throw Error(std::string("missing ablation variant ") + name);
  };
  const double full = mean_of("full");
  const double non_contrastive = mean_of("non_contrastive");
  const double baseline = mean_of("baseline");
  report.ordering_holds = full >= non_contrastive && non_contrastive >= baseline;

  json j;
  j["ordering"] = "full >= non_contrastive >= baseline (mean final return)";
  j["ordering_holds"] = report.ordering_holds;
  for (const auto& [name, summary] : report.variants) {
    json v;
    v["mean_final_return"] = summary.mean_final;
    v["std_final_return"] = summary.std_final;
    v["median_first_success_step"] =
        std::isfinite(summary.median_first_success)
            ? json(summary.median_first_success)
            : json(nullptr);
    v["summary"] = summary.summary_path;
    j["variants"][name] = std::move(v);
  }
  ExperimentConfig resolved = cfg;
  resolved.finalize();
  const fs::path path = fs::path(resolved.out_dir) / "ablate" / "report.json";
  fs::create_directories(path.parent_path());
  write_text_file(path, j.dump(2) + "\n");
  report.report_path = path.string();
  return report;
}

namespace {

// A small world model is enough to measure planner-vs-oracle gaps; the
// exhaustive oracle enumerates 9 points per action dim over both planned
// steps, which is only tractable at low dimension.
told::ToldConfig bench_told_config() {
  told::ToldConfig cfg;
  cfg.obs_dim = 4;
  cfg.latent_dim = 4;
  cfg.action_dim = 2;
  cfg.encoder_hidden = 8;
  cfg.encoder_layers = 1;
  cfg.head_hidden = 8;
  cfg.head_layers = 1;
  return cfg;
}

}  // namespace

PlanBenchReport run_plan_bench(const ExperimentConfig& cfg,
                               std::uint64_t seed) {
  PlanBenchReport report;
  const planner::Scoring variants[4] = {
      planner::Scoring::kSumRewards, planner::Scoring::kRewardsPlusTerminal,
      planner::Scoring::kValueSum, planner::Scoring::kCuriosityValueSum};
  const int trials = 5;
  const double grid_points[9] = {-1.0, -0.75, -0.5, -0.25, 0.0,
                                 0.25, 0.5,  0.75, 1.0};

  for (const auto scoring : variants) {
    PlanBenchEntry entry;
    entry.scoring = planner::to_string(scoring);
    double planner_sum = 0.0;
    double oracle_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      told::ToldModel model(bench_told_config());
      auto layout = std::make_shared<nn::ParamLayout>();
      model.declare(*layout);
      nn::LayoutPtr frozen_layout = layout;
      model.bind(*frozen_layout);
      nn::ParamVector params(frozen_layout);
      nn::Rng init = nn::make_rng(seed, 700 + static_cast<unsigned>(t));
      model.init_params(params, init);

      planner::CemConfig pcfg;
      pcfg.horizon = 1;
      pcfg.population = 256;
      pcfg.elites = 32;
      pcfg.iterations = 6;
      pcfg.scoring = scoring;
      nn::Rng data = nn::make_rng(seed, 800 + static_cast<unsigned>(t));
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> obs(4);
      for (double& x : obs) x = u(data);
      const std::vector<double> z0 = model.encode(params, obs);

      nn::Rng plan_rng = nn::make_rng(seed, 900 + static_cast<unsigned>(t));
      planner::PlanResult plan =
          planner::plan(model, params, pcfg, obs, plan_rng);
      planner::ActionSequence mean_seq;
      mean_seq.actions = plan.dist.mu;
      const double planner_score =
          planner::score_sequence(model, params, z0, mean_seq, pcfg);

      double oracle = -1e300;
      planner::ActionSequence probe;
      probe.actions.assign(2, std::vector<double>(2, 0.0));
      for (int i0 = 0; i0 < 9; ++i0) {
        for (int j0 = 0; j0 < 9; ++j0) {
          for (int i1 = 0; i1 < 9; ++i1) {
            for (int j1 = 0; j1 < 9; ++j1) {
              probe.actions[0][0] = grid_points[i0];
              probe.actions[0][1] = grid_points[j0];
              probe.actions[1][0] = grid_points[i1];
              probe.actions[1][1] = grid_points[j1];
              oracle = std::max(oracle, planner::score_sequence(
                                            model, params, z0, probe, pcfg));
            }
          }
        }
      }
      planner_sum += planner_score;
      oracle_sum += oracle;
    }
    entry.planner_score = planner_sum / trials;
    entry.oracle_score = oracle_sum / trials;
    entry.mean_gap = entry.oracle_score - entry.planner_score;
    report.entries.push_back(std::move(entry));
  }

  checks::CheckResult recovery = checks::run_cem_grid_recovery(seed);
  checks::CheckResult toy = checks::run_cem_toy_model(seed);
  report.grid_recovery_pass = recovery.pass;
  report.toy_model_pass = toy.pass;

  json j;
  for (const auto& e : report.entries) {
    json v;
    v["planner_score"] = e.planner_score;
    v["oracle_score"] = e.oracle_score;
    v["mean_gap"] = e.mean_gap;
    j["learned_model_gap"][e.scoring] = std::move(v);
  }
  j["synthetic"]["grid_argmax_recovery"] = {{"pass", recovery.pass},
                                            {"detail", recovery.detail}};
  j["synthetic"]["toy_model_near_optimality"] = {{"pass", toy.pass},
                                                 {"detail", toy.detail}};
  ExperimentConfig resolved = cfg;
  resolved.finalize();
  const fs::path dir = fs::path(resolved.out_dir) / "plan_bench";
  fs::create_directories(dir);
  const fs::path path = dir / "report.json";
  write_text_file(path, j.dump(2) + "\n");
  report.report_path = path.string();
  return report;
}

int run_oracle_check(std::uint64_t seed, std::FILE* out) {
  const std::vector<checks::CheckResult> results = checks::run_all_fast(seed);
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
    if (out != nullptr) {
      std::fprintf(out, "[%s] %-42s %s\n", r.pass ? "PASS" : "FAIL",
                   r.name.c_str(), r.detail.c_str());
    }
  }
  if (out != nullptr) {
    std::fprintf(out, "%d/%zu checks passed\n",
                 static_cast<int>(results.size()) - failures, results.size());
  }
  return failures;
}

}  // namespace ccem::experiment
