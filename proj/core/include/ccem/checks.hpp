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

#ifndef CCEM_CHECKS_HPP_
#define CCEM_CHECKS_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ccem/curiosity/icm.hpp"
#include "ccem/told/model.hpp"

namespace ccem::checks {

// One verdict from an oracle suite. `detail` is a single line with the
// numbers behind the verdict (worst error, trial counts, elapsed time).
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

bool all_pass(const std::vector<CheckResult>& results);

// Model dims small enough that finite differences over every parameter stay
// fast; the oracle suites are about correctness, not capacity.
told::ToldConfig small_told_config();
curiosity::IcmConfig small_icm_config();

// A world model and curiosity module bound into one randomly initialized
// parameter vector.
struct Rig {
  std::unique_ptr<told::ToldModel> model;
  std::unique_ptr<curiosity::Icm> icm;
  nn::LayoutPtr layout;
  nn::ParamVector params;
};

Rig make_rig(std::uint64_t seed, const told::ToldConfig& told_cfg,
             const curiosity::IcmConfig& icm_cfg);
Rig make_rig(std::uint64_t seed);  // small configs above

// Finite-difference gradient checks for every training loss, over all
// parameter entries, `instances` randomized instances per loss family.
std::vector<CheckResult> run_gradient_suite(std::uint64_t seed = 0,
                                            int instances = 20);

// Exact-zero assertions: target segments never receive gradient, the policy
// objective touches only policy segments, and the TD target contributes no
// gradient. Every trial must hold exactly.
std::vector<CheckResult> run_stop_gradient_suite(std::uint64_t seed = 0,
                                                 int trials = 20);

// Single-action planner recovery of score(a) = -||a - a*||^2 against a
// 101x101 grid-search oracle, L-inf tolerance 0.05.
CheckResult run_cem_grid_recovery(std::uint64_t seed = 0, int trials = 20);

// Two-action planning on a toy linear latent model: planner score must reach
// 0.95x the exhaustive 5-points-per-dim optimum in >= 18/20 trials.
CheckResult run_cem_toy_model(std::uint64_t seed = 0, int trials = 20);

// Closed-form cases of the intrinsic reward law to 1e-9: zero at exact
// prediction, decay ratio e over one 1/alpha window, linearity in the weight
// and in the extrinsic/intrinsic normalization ratio.
std::vector<CheckResult> run_intrinsic_law(std::uint64_t seed = 0);

// InfoNCE identities: uniform logits give ln N (N in {2, 16, 256}); the loss
// strictly decreases as the positive logit grows; the full encoder path with
// W = 0 reproduces ln N.
std::vector<CheckResult> run_infonce_identities(std::uint64_t seed = 0);

// EMA update is exactly (1 - zeta) * target + zeta * online for
// zeta in {0, 0.01, 1}.
std::vector<CheckResult> run_ema_identity(std::uint64_t seed = 0);

// Scoring-variant structure: ValueSum and CuriosityValueSum are bitwise
// identical given the same parameters; with gamma = 0 every variant reduces
// to its first term.
std::vector<CheckResult> run_scoring_structure(std::uint64_t seed = 0);

// All suites above, in order.
std::vector<CheckResult> run_all_fast(std::uint64_t seed = 0);

}  // namespace ccem::checks

#endif  // CCEM_CHECKS_HPP_
