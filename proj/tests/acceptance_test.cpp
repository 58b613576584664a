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

// Acceptance gate: every release criterion, one verdict line each. The
// numeric suites run against frozen oracles (finite differences, exhaustive
// search, closed forms); the trailing criteria train real runs at desk scale,
// so the whole binary takes tens of minutes on one CPU core.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccem/checks.hpp"
#include "ccem/config.hpp"
#include "ccem/experiment.hpp"

namespace {

using namespace ccem;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Gate {
  int failures = 0;

  void verdict(int id, bool pass, const std::string& text) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", id,
                text.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string counted(const std::vector<checks::CheckResult>& results) {
  int pass = 0;
  for (const auto& r : results) pass += r.pass ? 1 : 0;
  std::string worst;
  for (const auto& r : results) {
    if (!r.pass) {
      worst = "; first failure " + r.name + " (" + r.detail + ")";
      break;
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d/%zu checks", pass, results.size());
  return buf + worst;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Desk-scale sparse-exploration run: small nets and planner so ten seeds of
// thirty thousand steps fit the time budget on one core.
constexpr const char* kTrendConfig = R"({
  "env": "pointmass-sparse",
  "seeds": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
  "workers": 1,
  "told.latent_dim": 10, "told.encoder_hidden": 32, "told.encoder_layers": 1,
  "told.head_hidden": 32, "told.head_layers": 1,
  "icm.action_latent_dim": 8, "icm.inverse_hidden": 32, "icm.inverse_layers": 1,
  "icm.action_hidden": 32, "icm.action_layers": 1,
  "cem.population": 64, "cem.elites": 8, "cem.iterations": 3, "cem.horizon": 3,
  "cem.scoring": "curiosity_value_sum",
  "train.batch": 32, "train.horizon_k": 3,
  "train.total_env_steps": 30000, "train.seed_steps": 1000,
  "train.eval_every": 30000, "train.eval_episodes": 10,
  "train.intrinsic_C": 3.0,
  "train.deterministic_timing": true
})";

// Tiny run for the byte-determinism criterion.
constexpr const char* kDeterminismConfig = R"({
  "env": "pointmass-sparse",
  "seeds": [0],
  "workers": 1,
  "episode_length": 200,
  "told.latent_dim": 8, "told.encoder_hidden": 16, "told.encoder_layers": 1,
  "told.head_hidden": 16, "told.head_layers": 1,
  "icm.action_latent_dim": 4, "icm.inverse_hidden": 16, "icm.inverse_layers": 1,
  "icm.action_hidden": 16, "icm.action_layers": 1,
  "cem.population": 32, "cem.elites": 4, "cem.iterations": 2, "cem.horizon": 2,
  "train.batch": 8, "train.horizon_k": 3,
  "train.total_env_steps": 1000, "train.seed_steps": 200,
  "train.eval_every": 500, "train.eval_episodes": 2,
  "train.deterministic_timing": true
})";

std::string median_text(double median) {
  if (std::isinf(median)) return "never";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.0f", median);
  return buf;
}

}  // namespace

int main() {
  Gate gate;
  const auto out_root = std::filesystem::current_path() / "acceptance_out";
  std::filesystem::remove_all(out_root);
  std::filesystem::create_directories(out_root);

  // 1. Finite differences validate the analytic gradient of every loss
  //    family over every parameter entry.
  {
    const double t0 = now_s();
    auto results = checks::run_gradient_suite(0, 20);
    const double dt = now_s() - t0;
    gate.verdict(1, checks::all_pass(results) && dt < 60.0,
                 fmt("gradients vs finite differences: %s in %.1f s (budget 60 s)",
                     counted(results).c_str(), dt));
  }

  // 2. Stop-gradient boundaries are exact zeros in every trial.
  {
    auto results = checks::run_stop_gradient_suite(0, 20);
    gate.verdict(2, checks::all_pass(results),
                 fmt("stop-gradient exact zeros: %s", counted(results).c_str()));
  }

  // 3. Single-action planning recovers grid-search optima.
  {
    const double t0 = now_s();
    auto r = checks::run_cem_grid_recovery(0, 20);
    const double dt = now_s() - t0;
    gate.verdict(3, r.pass && dt < 5.0,
                 fmt("planner vs 101x101 grid: %s in %.1f s (budget 5 s)",
                     r.detail.c_str(), dt));
  }

  // 4. Two-action planning on the toy linear model reaches the exhaustive
  //    optimum.
  {
    const double t0 = now_s();
    auto r = checks::run_cem_toy_model(0, 20);
    const double dt = now_s() - t0;
    gate.verdict(4, r.pass && dt < 30.0,
                 fmt("planner vs exhaustive toy-model search: %s in %.1f s "
                     "(budget 30 s)",
                     r.detail.c_str(), dt));
  }

  // 5. The intrinsic reward law matches its closed forms.
  {
    auto results = checks::run_intrinsic_law(0);
    gate.verdict(5, checks::all_pass(results),
                 fmt("intrinsic reward closed forms: %s", counted(results).c_str()));
  }

  // 6. InfoNCE identities: ln N at uniform logits, monotone in the positive.
  {
    auto results = checks::run_infonce_identities(0);
    gate.verdict(6, checks::all_pass(results),
                 fmt("infonce identities: %s", counted(results).c_str()));
  }

  // 7. The EMA target update is exact for zeta in {0, 0.01, 1}.
  {
    auto results = checks::run_ema_identity(0);
    gate.verdict(7, checks::all_pass(results),
                 fmt("ema identities: %s", counted(results).c_str()));
  }

  // 8. Scoring variants: the two value-based scores are bitwise identical
  //    and gamma = 0 collapses every variant to its first term.
  {
    auto results = checks::run_scoring_structure(0);
    gate.verdict(8, checks::all_pass(results),
                 fmt("scoring structure: %s", counted(results).c_str()));
  }

  // 9. Exploration trend at desk scale: curiosity-scored planning beats the
  //    vanilla reward-sum planner on sparse point mass, 10 seeds x 30k steps.
  double trend_minutes = 0.0;
  {
    ExperimentConfig ccem_cfg = ExperimentConfig::from_json_text(kTrendConfig);
    ccem_cfg.out_dir = (out_root / "trend").string();
    ExperimentConfig vanilla_cfg = ccem_cfg;
    vanilla_cfg.apply_override("cem.scoring", "sum_rewards");
    vanilla_cfg.apply_override("train.non_ccem", "true");
    vanilla_cfg.apply_override("train.non_contrastive", "true");

    const double t0 = now_s();
    experiment::TrainSummary ccem = experiment::run_train(ccem_cfg, "ccem");
    experiment::TrainSummary vanilla = experiment::run_train(vanilla_cfg, "vanilla");
    trend_minutes = (now_s() - t0) / 60.0;

    const bool mean_ok = ccem.mean_final >= 1.25 * vanilla.mean_final;
    const bool median_ok =
        ccem.median_first_success < vanilla.median_first_success;
    const bool budget_ok = trend_minutes < 30.0;
    gate.verdict(
        9, mean_ok && median_ok && budget_ok,
        fmt("exploration trend: final return %.1f vs %.1f (need >= 1.25x), "
            "first-success median %s vs %s (need strictly lower), %.1f min "
            "(budget 30)",
            ccem.mean_final, vanilla.mean_final,
            median_text(ccem.median_first_success).c_str(),
            median_text(vanilla.median_first_success).c_str(), trend_minutes));
  }

  // 10. Ablation ordering over the same budget, with the full and
  //     non-contrastive arms within noise of each other (two combined
  //     standard errors). The report is written even when the check fails.
  {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(kTrendConfig);
    cfg.out_dir = (out_root / "ablation").string();
    experiment::AblationReport report = experiment::run_ablate(cfg);

    const experiment::TrainSummary* full = nullptr;
    const experiment::TrainSummary* non_contrastive = nullptr;
    const experiment::TrainSummary* baseline = nullptr;
    for (const auto& [name, summary] : report.variants) {
      if (name == "full") full = &summary;
      if (name == "non_contrastive") non_contrastive = &summary;
      if (name == "baseline") baseline = &summary;
    }
    auto se = [](const experiment::TrainSummary& s) {
      return s.std_final / std::sqrt(static_cast<double>(s.outcomes.size()));
    };
    const double gap = std::fabs(full->mean_final - non_contrastive->mean_final);
    const double noise = std::hypot(se(*full), se(*non_contrastive));
    const bool within_noise = gap <= 2.0 * noise;
    gate.verdict(10, report.ordering_holds && within_noise,
                 fmt("ablation ordering: full %.1f >= non_contrastive %.1f >= "
                     "baseline %.1f (%s); full vs non_contrastive gap %.1f "
                     "(%.2f combined SE, need <= 2); report %s",
                     full->mean_final, non_contrastive->mean_final,
                     baseline->mean_final,
                     report.ordering_holds ? "holds" : "VIOLATED", gap,
                     noise > 0.0 ? gap / noise : 0.0,
                     report.report_path.c_str()));
  }

  // 11. Identical (config, seed) reruns produce byte-identical metrics.
  {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(kDeterminismConfig);
    cfg.out_dir = (out_root / "det_a").string();
    experiment::TrainSummary a = experiment::run_train(cfg, "rerun");
    cfg.out_dir = (out_root / "det_b").string();
    experiment::TrainSummary b = experiment::run_train(cfg, "rerun");

    const std::string bytes_a = read_file(a.outcomes[0].metrics_path);
    const std::string bytes_b = read_file(b.outcomes[0].metrics_path);
    const bool same = !bytes_a.empty() && bytes_a == bytes_b;
    gate.verdict(11, same,
                 fmt("rerun determinism: metrics CSVs %s (%zu bytes)",
                     same ? "byte-identical" : "DIFFER", bytes_a.size()));
  }

  std::printf("%d/11 criteria passed\n", 11 - gate.failures);
  return gate.failures == 0 ? 0 : 1;
}
