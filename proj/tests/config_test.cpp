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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ccem/config.hpp"
#include "ccem/error.hpp"
#include "doctest.h"

namespace {

using namespace ccem;

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "ccem_config_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("an empty config resolves every env preset") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text("{}");
  CHECK(cfg.env == "pointmass-sparse");
  CHECK(cfg.action_repeat == 4);
  CHECK(cfg.episode_length == 1000);
  CHECK(cfg.told.obs_dim == 4);
  CHECK(cfg.told.action_dim == 2);
  CHECK(cfg.told.latent_dim == 32);
  CHECK(cfg.icm.latent_dim == 32);
  CHECK(cfg.icm.action_dim == 2);
  CHECK(cfg.train.intrinsic_C == 0.3);  // pointmass preset
  CHECK(!cfg.out_dir_explicit());
}

TEST_CASE("the pendulum preset carries its own intrinsic weight") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({"env": "pendulum-dense"})");
  CHECK(cfg.action_repeat == 2);
  CHECK(cfg.told.obs_dim == 3);
  CHECK(cfg.told.action_dim == 1);
  CHECK(cfg.train.intrinsic_C == 0.2);
}

TEST_CASE("an explicit intrinsic weight beats the env preset") {
  ExperimentConfig cfg =
      ExperimentConfig::from_json_text(R"({"train.intrinsic_C": 0.7})");
  CHECK(cfg.train.intrinsic_C == 0.7);
}

TEST_CASE("resolved configs round trip exactly") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(
      R"({"env": "pointmass-sparse", "cem.population": 64, "seeds": [1, 2, 3],
          "told.latent_dim": 12, "train.batch": 16})");
  const std::string text = cfg.to_json_text();
  ExperimentConfig again = ExperimentConfig::from_json_text(text);
  CHECK(again.to_json_text() == text);
  CHECK(again.cem.population == 64);
  CHECK(again.told.latent_dim == 12);
  CHECK(again.train.batch == 16);
  REQUIRE(again.seeds.size() == 3);
  CHECK(again.seeds[1] == 2);
}

TEST_CASE("unknown keys and wrong types are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"cem.populaton": 64})"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"cem.population": "lots"})"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"seeds": "zero"})"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{not json"), ConfigError);
}

TEST_CASE("invalid values fail finalize") {
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"cem.elites": 0})"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"episode_length": 10})"),
                  ConfigError);  // not a multiple of the action repeat
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"env": "mystery"})"),
                  ConfigError);
}

TEST_CASE("overrides parse json literals and plain strings") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text("{}");
  cfg.apply_override("cem.population", "64");
  CHECK(cfg.cem.population == 64);
  cfg.apply_override("train.non_ccem", "true");
  CHECK(cfg.train.non_ccem);
  cfg.apply_override("env", "pendulum-dense");
  CHECK(cfg.env == "pendulum-dense");
  CHECK(cfg.told.obs_dim == 3);  // re-finalized against the new env
  cfg.apply_override("cem.scoring", "sum_rewards");
  CHECK(cfg.cem.scoring == planner::Scoring::kSumRewards);
  cfg.apply_override("out_dir", "elsewhere");
  CHECK(cfg.out_dir == "elsewhere");
  CHECK(cfg.out_dir_explicit());
  CHECK_THROWS_AS(cfg.apply_override("no.such.key", "1"), ConfigError);
}

TEST_CASE("config files load and missing files fail") {
  const std::string path = (scratch_dir() / "cfg.json").string();
  {
    std::ofstream out(path);
    out << R"({"train.total_env_steps": 5000, "workers": 2})";
  }
  ExperimentConfig cfg = ExperimentConfig::from_json_file(path);
  CHECK(cfg.train.total_env_steps == 5000);
  CHECK(cfg.workers == 2);
  CHECK_THROWS_AS(ExperimentConfig::from_json_file(path + ".nope"), ConfigError);
}

TEST_CASE("make setup copies the resolved pieces") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(
      R"({"told.latent_dim": 9, "cem.horizon": 2})");
  train::TrainerSetup s = cfg.make_setup(17, "m.csv", "ckpt");
  CHECK(s.env_name == "pointmass-sparse");
  CHECK(s.seed == 17);
  CHECK(s.metrics_path == "m.csv");
  CHECK(s.checkpoint_stem == "ckpt");
  CHECK(s.told.latent_dim == 9);
  CHECK(s.icm.latent_dim == 9);
  CHECK(s.cem.horizon == 2);
  CHECK(s.told.obs_dim == 4);
}
