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

#include "ccem/config.hpp"

#include <fstream>
#include <sstream>

#include "ccem/envs/env.hpp"
#include "ccem/error.hpp"
#include "json.hpp"

namespace ccem {
namespace {

using nlohmann::json;

nn::Activation activation_from_string(const std::string& name,
                                      const std::string& key) {
  if (name == "elu") return nn::Activation::kElu;
  if (name == "tanh") return nn::Activation::kTanh;
  if (name == "identity") return nn::Activation::kIdentity;
  throw ConfigError(key + ": unknown activation '" + name +
                    "' (expected elu, tanh or identity)");
}

std::string activation_to_string(nn::Activation a) {
  switch (a) {
    case nn::Activation::kElu: return "elu";
    case nn::Activation::kTanh: return "tanh";
    case nn::Activation::kIdentity: return "identity";
  }
  throw ConfigError("unknown activation enum value");
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ConfigError(key + ": expected an integer, got " + v.dump());
  }
  return v.get<int>();
}

std::int64_t as_i64(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ConfigError(key + ": expected an integer, got " + v.dump());
  }
  return v.get<std::int64_t>();
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) {
    throw ConfigError(key + ": expected a number, got " + v.dump());
  }
  return v.get<double>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) {
    throw ConfigError(key + ": expected true or false, got " + v.dump());
  }
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw ConfigError(key + ": expected a string, got " + v.dump());
  }
  return v.get<std::string>();
}

std::vector<std::uint64_t> as_seed_list(const json& v, const std::string& key) {
  std::vector<std::uint64_t> out;
  if (v.is_number_unsigned() || v.is_number_integer()) {
    out.push_back(v.get<std::uint64_t>());
    return out;
  }
  if (!v.is_array() || v.empty()) {
    throw ConfigError(key + ": expected a seed or non-empty seed array, got " +
                      v.dump());
  }
  for (const auto& e : v) {
    if (!e.is_number_unsigned() && !e.is_number_integer()) {
      throw ConfigError(key + ": seeds must be integers, got " + e.dump());
    }
    out.push_back(e.get<std::uint64_t>());
  }
  return out;
}

}  // namespace

namespace {

// Applies one key/value pair; returns false for unknown keys so the caller
// can report them with the original spelling.
bool set_key(ExperimentConfig& c, bool& intrinsic_c_set, bool& out_dir_set,
             const std::string& k, const json& v) {
  // Top-level.
  if (k == "env") { c.env = as_string(v, k); return true; }
  if (k == "action_repeat") { c.action_repeat = as_int(v, k); return true; }
  if (k == "episode_length") { c.episode_length = as_int(v, k); return true; }
  if (k == "seeds") { c.seeds = as_seed_list(v, k); return true; }
  if (k == "out_dir") {
    c.out_dir = as_string(v, k);
    out_dir_set = true;
    return true;
  }
  if (k == "workers") { c.workers = as_int(v, k); return true; }

  // World model.
  if (k == "told.latent_dim") { c.told.latent_dim = as_int(v, k); return true; }
  if (k == "told.encoder_hidden") { c.told.encoder_hidden = as_int(v, k); return true; }
  if (k == "told.encoder_layers") { c.told.encoder_layers = as_int(v, k); return true; }
  if (k == "told.head_hidden") { c.told.head_hidden = as_int(v, k); return true; }
  if (k == "told.head_layers") { c.told.head_layers = as_int(v, k); return true; }
  if (k == "told.twin_q") { c.told.twin_q = as_bool(v, k); return true; }
  if (k == "told.activation") {
    c.told.activation = activation_from_string(as_string(v, k), k);
    return true;
  }

  // Curiosity module.
  if (k == "icm.action_latent_dim") { c.icm.action_latent_dim = as_int(v, k); return true; }
  if (k == "icm.inverse_hidden") { c.icm.inverse_hidden = as_int(v, k); return true; }
  if (k == "icm.inverse_layers") { c.icm.inverse_layers = as_int(v, k); return true; }
  if (k == "icm.action_hidden") { c.icm.action_hidden = as_int(v, k); return true; }
  if (k == "icm.action_layers") { c.icm.action_layers = as_int(v, k); return true; }
  if (k == "icm.activation") {
    c.icm.activation = activation_from_string(as_string(v, k), k);
    return true;
  }

  // Planner.
  if (k == "cem.horizon") { c.cem.horizon = as_int(v, k); return true; }
  if (k == "cem.population") { c.cem.population = as_int(v, k); return true; }
  if (k == "cem.elites") { c.cem.elites = as_int(v, k); return true; }
  if (k == "cem.iterations") { c.cem.iterations = as_int(v, k); return true; }
  if (k == "cem.gamma") { c.cem.gamma = as_double(v, k); return true; }
  if (k == "cem.policy_fraction") { c.cem.policy_fraction = as_double(v, k); return true; }
  if (k == "cem.sigma_min") { c.cem.sigma_min = as_double(v, k); return true; }
  if (k == "cem.scoring") {
    c.cem.scoring = planner::scoring_from_string(as_string(v, k));
    return true;
  }
  if (k == "cem.soft_refit") { c.cem.soft_refit = as_bool(v, k); return true; }
  if (k == "cem.soft_temperature") { c.cem.soft_temperature = as_double(v, k); return true; }
  if (k == "cem.warm_start") { c.cem.warm_start = as_bool(v, k); return true; }

  // Training loop.
  if (k == "train.total_env_steps") { c.train.total_env_steps = as_i64(v, k); return true; }
  if (k == "train.seed_steps") { c.train.seed_steps = as_i64(v, k); return true; }
  if (k == "train.updates_per_episode") { c.train.updates_per_episode = as_int(v, k); return true; }
  if (k == "train.batch") { c.train.batch = as_int(v, k); return true; }
  if (k == "train.horizon_k") { c.train.horizon_k = as_int(v, k); return true; }
  if (k == "train.eval_every") { c.train.eval_every = as_i64(v, k); return true; }
  if (k == "train.eval_episodes") { c.train.eval_episodes = as_int(v, k); return true; }
  if (k == "train.lr_model") { c.train.lr_model = as_double(v, k); return true; }
  if (k == "train.lr_inverse") { c.train.lr_inverse = as_double(v, k); return true; }
  if (k == "train.lr_contrastive") { c.train.lr_contrastive = as_double(v, k); return true; }
  if (k == "train.zeta") { c.train.zeta = as_double(v, k); return true; }
  if (k == "train.target_q_update_every") { c.train.target_q_update_every = as_int(v, k); return true; }
  if (k == "train.target_encoder_update_every") { c.train.target_encoder_update_every = as_int(v, k); return true; }
  if (k == "train.lambda") { c.train.weights.lambda = as_double(v, k); return true; }
  if (k == "train.c1") { c.train.weights.c1 = as_double(v, k); return true; }
  if (k == "train.c2") { c.train.weights.c2 = as_double(v, k); return true; }
  if (k == "train.c3") { c.train.weights.c3 = as_double(v, k); return true; }
  if (k == "train.gamma") { c.train.weights.gamma = as_double(v, k); return true; }
  if (k == "train.contrastive_coeff") { c.train.contrastive_coeff = as_double(v, k); return true; }
  if (k == "train.intrinsic_C") {
    c.train.intrinsic_C = as_double(v, k);
    intrinsic_c_set = true;
    return true;
  }
  if (k == "train.intrinsic_alpha") { c.train.intrinsic_alpha = as_double(v, k); return true; }
  if (k == "train.non_contrastive") { c.train.non_contrastive = as_bool(v, k); return true; }
  if (k == "train.non_ccem") { c.train.non_ccem = as_bool(v, k); return true; }
  if (k == "train.replay_capacity") {
    std::int64_t cap = as_i64(v, k);
    if (cap <= 0) throw ConfigError(k + ": must be positive");
    c.train.replay_capacity = static_cast<std::size_t>(cap);
    return true;
  }
  if (k == "train.augment_noise") { c.train.augment_noise = as_double(v, k); return true; }
  if (k == "train.explore_noise_start") { c.train.explore_noise_start = as_double(v, k); return true; }
  if (k == "train.explore_noise_end") { c.train.explore_noise_end = as_double(v, k); return true; }
  if (k == "train.explore_decay_steps") { c.train.explore_decay_steps = as_i64(v, k); return true; }
  if (k == "train.deterministic_timing") { c.train.deterministic_timing = as_bool(v, k); return true; }

  return false;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object of dotted keys");
  }
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (!set_key(cfg, cfg.intrinsic_c_set_, cfg.out_dir_set_, key, value)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  cfg.finalize();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

void ExperimentConfig::apply_override(const std::string& key,
                                      const std::string& value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;  // bare strings like env names arrive unquoted
  }
  if (!set_key(*this, intrinsic_c_set_, out_dir_set_, key, v)) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  finalize();
}

void ExperimentConfig::finalize() {
  auto probe = envs::make_env(env, action_repeat, episode_length);
  const envs::EnvSpec& spec = probe->spec();
  action_repeat = spec.action_repeat;
  episode_length = spec.episode_length;
  told.obs_dim = spec.obs_dim;
  told.action_dim = spec.action_dim;
  if (told.latent_dim == 0) told.latent_dim = 32;
  icm.latent_dim = told.latent_dim;
  icm.action_dim = told.action_dim;
  if (!intrinsic_c_set_) {
    train.intrinsic_C = spec.intrinsic_weight;
    intrinsic_c_set_ = true;
  }
  if (seeds.empty()) throw ConfigError("seeds: must not be empty");
  if (workers < 1) throw ConfigError("workers: must be >= 1");
  told.validate();
  icm.validate();
  cem.validate(told.action_dim);
  train.validate();
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["env"] = env;
  j["action_repeat"] = action_repeat;
  j["episode_length"] = episode_length;
  j["seeds"] = seeds;
  j["out_dir"] = out_dir;
  j["workers"] = workers;

  j["told.latent_dim"] = told.latent_dim;
  j["told.encoder_hidden"] = told.encoder_hidden;
  j["told.encoder_layers"] = told.encoder_layers;
  j["told.head_hidden"] = told.head_hidden;
  j["told.head_layers"] = told.head_layers;
  j["told.twin_q"] = told.twin_q;
  j["told.activation"] = activation_to_string(told.activation);

  j["icm.action_latent_dim"] = icm.action_latent_dim;
  j["icm.inverse_hidden"] = icm.inverse_hidden;
  j["icm.inverse_layers"] = icm.inverse_layers;
  j["icm.action_hidden"] = icm.action_hidden;
  j["icm.action_layers"] = icm.action_layers;
  j["icm.activation"] = activation_to_string(icm.activation);

  j["cem.horizon"] = cem.horizon;
  j["cem.population"] = cem.population;
  j["cem.elites"] = cem.elites;
  j["cem.iterations"] = cem.iterations;
  j["cem.gamma"] = cem.gamma;
  j["cem.policy_fraction"] = cem.policy_fraction;
  j["cem.sigma_min"] = cem.sigma_min;
  j["cem.scoring"] = planner::to_string(cem.scoring);
  j["cem.soft_refit"] = cem.soft_refit;
  j["cem.soft_temperature"] = cem.soft_temperature;
  j["cem.warm_start"] = cem.warm_start;

  j["train.total_env_steps"] = train.total_env_steps;
  j["train.seed_steps"] = train.seed_steps;
  j["train.updates_per_episode"] = train.updates_per_episode;
  j["train.batch"] = train.batch;
  j["train.horizon_k"] = train.horizon_k;
  j["train.eval_every"] = train.eval_every;
  j["train.eval_episodes"] = train.eval_episodes;
  j["train.lr_model"] = train.lr_model;
  j["train.lr_inverse"] = train.lr_inverse;
  j["train.lr_contrastive"] = train.lr_contrastive;
  j["train.zeta"] = train.zeta;
  j["train.target_q_update_every"] = train.target_q_update_every;
  j["train.target_encoder_update_every"] = train.target_encoder_update_every;
  j["train.lambda"] = train.weights.lambda;
  j["train.c1"] = train.weights.c1;
  j["train.c2"] = train.weights.c2;
  j["train.c3"] = train.weights.c3;
  j["train.gamma"] = train.weights.gamma;
  j["train.contrastive_coeff"] = train.contrastive_coeff;
  j["train.intrinsic_C"] = train.intrinsic_C;
  j["train.intrinsic_alpha"] = train.intrinsic_alpha;
  j["train.non_contrastive"] = train.non_contrastive;
  j["train.non_ccem"] = train.non_ccem;
  j["train.replay_capacity"] = static_cast<std::int64_t>(train.replay_capacity);
  j["train.augment_noise"] = train.augment_noise;
  j["train.explore_noise_start"] = train.explore_noise_start;
  j["train.explore_noise_end"] = train.explore_noise_end;
  j["train.explore_decay_steps"] = train.explore_decay_steps;
  j["train.deterministic_timing"] = train.deterministic_timing;

  return j.dump(2) + "\n";
}

train::TrainerSetup ExperimentConfig::make_setup(
    std::uint64_t seed, const std::string& metrics_path,
    const std::string& checkpoint_stem) const {
  train::TrainerSetup s;
  s.env_name = env;
  s.action_repeat = action_repeat;
  s.episode_length = episode_length;
  s.told = told;
  s.icm = icm;
  s.cem = cem;
  s.train = train;
  s.seed = seed;
  s.metrics_path = metrics_path;
  s.checkpoint_stem = checkpoint_stem;
  return s;
}

}  // namespace ccem
