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

#ifndef CCEM_CONFIG_HPP_
#define CCEM_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ccem/train/trainer.hpp"

namespace ccem {

// One experiment: environment, model/planner/training settings and the seed
// list. Parsed from a flat JSON object with dotted keys ("cem.population");
// unknown keys are rejected. After parsing, env presets (action repeat,
// intrinsic weight, model dims) are resolved into explicit values, so the
// emitted resolved config reproduces the run byte-for-byte.
struct ExperimentConfig {
  std::string env = "pointmass-sparse";
  int action_repeat = 0;   // resolved from env preset when 0
  int episode_length = 0;  // resolved to the env default when 0
  told::ToldConfig told;
  curiosity::IcmConfig icm;
  planner::CemConfig cem;
  train::TrainConfig train;
  std::vector<std::uint64_t> seeds = {0};
  std::string out_dir = "out";
  int workers = 1;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);

  // Applies one dotted-key override; the value is parsed as JSON when it
  // scans as a literal, else taken as a string.
  void apply_override(const std::string& key, const std::string& value);

  // Resolves presets and validates. from_json_* and apply_override leave the
  // config finalized; call again after mutating fields directly.
  void finalize();

  // All keys with their resolved values, sorted, two-space indent.
  std::string to_json_text() const;

  // True once out_dir came from a config file or an override, so callers can
  // tell an explicit value from the built-in default.
  bool out_dir_explicit() const { return out_dir_set_; }

  train::TrainerSetup make_setup(std::uint64_t seed,
                                 const std::string& metrics_path = "",
                                 const std::string& checkpoint_stem = "") const;

 private:
  bool intrinsic_c_set_ = false;
  bool out_dir_set_ = false;
};

}  // namespace ccem

#endif  // CCEM_CONFIG_HPP_
