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

#include "ccem/train/replay.hpp"

#include <random>
#include <string>

#include "ccem/error.hpp"

namespace ccem::train {

void Episode::validate() const {
  const std::size_t n = actions.size();
  if (n == 0) throw DimensionError("Episode: empty");
  if (observations.size() != n + 1) {
    throw DimensionError("Episode: expected " + std::to_string(n + 1) +
                         " observations, got " + std::to_string(observations.size()));
  }
  if (rewards.size() != n) {
    throw DimensionError("Episode: expected " + std::to_string(n) +
                         " rewards, got " + std::to_string(rewards.size()));
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity_transitions)
    : capacity_(capacity_transitions) {
  if (capacity_ == 0) throw ConfigError("ReplayBuffer: capacity must be > 0");
}

void ReplayBuffer::add_episode(Episode episode) {
  episode.validate();
  transitions_ += static_cast<std::size_t>(episode.length());
  episodes_.push_back(std::move(episode));
  while (transitions_ > capacity_ && episodes_.size() > 1) {
    transitions_ -= static_cast<std::size_t>(episodes_.front().length());
    episodes_.pop_front();
  }
}

bool ReplayBuffer::can_sample(int k) const {
  if (k < 1) return false;
  for (const auto& ep : episodes_) {
    if (ep.length() >= k) return true;
  }
  return false;
}

told::Trajectory ReplayBuffer::sample(int k, nn::Rng& rng) const {
  if (k < 1) throw Error("ReplayBuffer::sample: k must be >= 1");
  std::vector<std::size_t> eligible;
  eligible.reserve(episodes_.size());
  for (std::size_t i = 0; i < episodes_.size(); ++i) {
    if (episodes_[i].length() >= k) eligible.push_back(i);
  }
  if (eligible.empty()) {
    throw Error("ReplayBuffer::sample: no episode holds a " + std::to_string(k) +
                "-step slice");
  }
  std::uniform_int_distribution<std::size_t> pick_ep(0, eligible.size() - 1);
  const Episode& ep = episodes_[eligible[pick_ep(rng)]];
  std::uniform_int_distribution<int> pick_start(0, ep.length() - k);
  const int start = pick_start(rng);

  told::Trajectory traj;
  traj.observations.reserve(static_cast<std::size_t>(k + 1));
  traj.actions.reserve(static_cast<std::size_t>(k));
  traj.rewards.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j <= k; ++j) {
    traj.observations.push_back(ep.observations[static_cast<std::size_t>(start + j)]);
  }
  for (int j = 0; j < k; ++j) {
    traj.actions.push_back(ep.actions[static_cast<std::size_t>(start + j)]);
    traj.rewards.push_back(ep.rewards[static_cast<std::size_t>(start + j)]);
  }
  return traj;
}

}  // namespace ccem::train
