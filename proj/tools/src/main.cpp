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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccem/error.hpp"
#include "ccem/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string seeds_text;
  std::string env;
  std::string scoring;
  std::string out_dir;
  long long seed = -1;
  int workers = 0;
  bool non_contrastive = false;
  bool non_ccem = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON config file with flat dotted keys");
  cmd->add_option("--seed", o.seed, "run a single seed");
  cmd->add_option("--seeds", o.seeds_text,
                  "seed list '0,1,2' or inclusive range '0:9'");
  cmd->add_option("--env", o.env, "environment name");
  cmd->add_option("--scoring", o.scoring,
                  "sum_rewards | rewards_plus_terminal | value_sum | "
                  "curiosity_value_sum");
  cmd->add_flag("--non-contrastive", o.non_contrastive,
                "skip the contrastive update");
  cmd->add_flag("--non-ccem", o.non_ccem, "force intrinsic rewards to zero");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--workers", o.workers, "parallel seed workers");
  // Any other --key=value is a dotted config override.
  cmd->allow_extras();
}

std::string seeds_json(const std::string& text) {
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const long long lo = std::stoll(text.substr(0, colon));
    const long long hi = std::stoll(text.substr(colon + 1));
    if (lo > hi) throw ccem::ConfigError("--seeds range is empty: " + text);
    std::string out = "[";
    for (long long s = lo; s <= hi; ++s) {
      if (s != lo) out += ",";
      out += std::to_string(s);
    }
    return out + "]";
  }
  return "[" + text + "]";
}

ccem::ExperimentConfig build_config(CLI::App* cmd, const CommonOpts& o) {
  ccem::ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    cfg = ccem::ExperimentConfig::from_json_file(o.config_path);
  } else {
    cfg.finalize();
  }
  if (!cfg.out_dir_explicit()) {
    if (const char* env_out = std::getenv("CCEM_OUT")) {
      cfg.out_dir = env_out;
    }
  }
  for (const std::string& extra : cmd->remaining()) {
    if (extra.rfind("--", 0) != 0) {
      throw ccem::ConfigError("unrecognized argument '" + extra + "'");
    }
    const auto eq = extra.find('=');
    if (eq == std::string::npos || eq <= 2) {
      throw ccem::ConfigError("override must look like --key=value, got '" +
                              extra + "'");
    }
    cfg.apply_override(extra.substr(2, eq - 2), extra.substr(eq + 1));
  }
  // Named flags win over --key=value spellings of the same setting.
  if (!o.env.empty()) cfg.apply_override("env", o.env);
  if (!o.scoring.empty()) cfg.apply_override("cem.scoring", o.scoring);
  if (o.non_contrastive) cfg.apply_override("train.non_contrastive", "true");
  if (o.non_ccem) cfg.apply_override("train.non_ccem", "true");
  if (!o.out_dir.empty()) cfg.apply_override("out_dir", o.out_dir);
  if (o.workers > 0) cfg.apply_override("workers", std::to_string(o.workers));
  if (!o.seeds_text.empty()) {
    cfg.apply_override("seeds", seeds_json(o.seeds_text));
  }
  if (o.seed >= 0) cfg.apply_override("seeds", "[" + std::to_string(o.seed) + "]");
  return cfg;
}

int cmd_train(CLI::App* cmd, const CommonOpts& o) {
  ccem::ExperimentConfig cfg = build_config(cmd, o);
  ccem::experiment::TrainSummary summary = ccem::experiment::run_train(cfg);
  std::printf("trained %zu seed(s): mean final return %.4f +/- %.4f\n",
              summary.outcomes.size(), summary.mean_final, summary.std_final);
  if (std::isfinite(summary.median_first_success)) {
    std::printf("median first-success step: %.0f\n",
                summary.median_first_success);
  } else {
    std::printf("median first-success step: never\n");
  }
  std::printf("summary: %s\n", summary.summary_path.c_str());
  return 0;
}

int cmd_eval(CLI::App* cmd, const CommonOpts& o,
             const std::string& checkpoint) {
  ccem::ExperimentConfig cfg = build_config(cmd, o);
  const std::uint64_t seed = o.seed >= 0
                                 ? static_cast<std::uint64_t>(o.seed)
                                 : cfg.seeds.front();
  const double mean_return = ccem::experiment::run_eval(cfg, checkpoint, seed);
  std::printf("mean eval return: %.4f\n", mean_return);
  return 0;
}

int cmd_ablate(CLI::App* cmd, const CommonOpts& o) {
  ccem::ExperimentConfig cfg = build_config(cmd, o);
  ccem::experiment::AblationReport report = ccem::experiment::run_ablate(cfg);
  for (const auto& [name, summary] : report.variants) {
    std::printf("%-16s mean final return %.4f +/- %.4f\n", name.c_str(),
                summary.mean_final, summary.std_final);
  }
  std::printf("ordering full >= non_contrastive >= baseline: %s\n",
              report.ordering_holds ? "holds" : "VIOLATED (see report)");
  std::printf("report: %s\n", report.report_path.c_str());
  return 0;
}

int cmd_plan_bench(CLI::App* cmd, const CommonOpts& o) {
  ccem::ExperimentConfig cfg = build_config(cmd, o);
  const std::uint64_t seed =
      o.seed >= 0 ? static_cast<std::uint64_t>(o.seed) : cfg.seeds.front();
  ccem::experiment::PlanBenchReport report =
      ccem::experiment::run_plan_bench(cfg, seed);
  for (const auto& e : report.entries) {
    std::printf("%-24s planner %.4f oracle %.4f gap %.4f\n",
                e.scoring.c_str(), e.planner_score, e.oracle_score,
                e.mean_gap);
  }
  std::printf("grid argmax recovery: %s\n",
              report.grid_recovery_pass ? "pass" : "FAIL");
  std::printf("toy model near-optimality: %s\n",
              report.toy_model_pass ? "pass" : "FAIL");
  std::printf("report: %s\n", report.report_path.c_str());
  return (report.grid_recovery_pass && report.toy_model_pass) ? 0 : 1;
}

int cmd_oracle_check(const CommonOpts& o) {
  const std::uint64_t seed =
      o.seed >= 0 ? static_cast<std::uint64_t>(o.seed) : 0;
  const int failures = ccem::experiment::run_oracle_check(seed, stdout);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curiosity-driven cross-entropy-method planning experiments"};
  app.require_subcommand(1);

  CommonOpts train_opts, eval_opts, ablate_opts, bench_opts, oracle_opts;
  std::string checkpoint;

  CLI::App* train = app.add_subcommand("train", "train across seeds");
  add_common(train, train_opts);
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval, eval_opts);
  eval->add_option("--checkpoint", checkpoint,
                   "checkpoint stem (without .bin/.manifest)")
      ->required();
  CLI::App* ablate = app.add_subcommand("ablate", "run the 4-variant grid");
  add_common(ablate, ablate_opts);
  CLI::App* bench =
      app.add_subcommand("plan-bench", "planner-vs-oracle benchmarks");
  add_common(bench, bench_opts);
  CLI::App* oracle =
      app.add_subcommand("oracle-check", "gradient and identity suites");
  add_common(oracle, oracle_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train, train_opts);
    if (eval->parsed()) return cmd_eval(eval, eval_opts, checkpoint);
    if (ablate->parsed()) return cmd_ablate(ablate, ablate_opts);
    if (bench->parsed()) return cmd_plan_bench(bench, bench_opts);
    if (oracle->parsed()) return cmd_oracle_check(oracle_opts);
  } catch (const ccem::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
