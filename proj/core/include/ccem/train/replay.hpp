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

#ifndef CCEM_TRAIN_REPLAY_HPP_
#define CCEM_TRAIN_REPLAY_HPP_

#include <cstddef>
#include <deque>
#include <vector>

#include "ccem/nn/rng.hpp"
#include "ccem/told/losses.hpp"

namespace ccem::train {

// One finished episode: n decisions stored as n+1 observations, n actions
// and n rewards (rewards already summed over action repeat).
struct Episode {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<double>> actions;
  std::vector<double> rewards;

  int length() const { return static_cast<int>(actions.size()); }
  void validate() const;
};

// Episode-granular FIFO replay buffer. Whole episodes are evicted together,
// so sampled slices never cross an episode boundary or hit a truncated tail.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity_transitions);

  void add_episode(Episode episode);

  std::size_t size() const { return transitions_; }  // stored transitions
  std::size_t num_episodes() const { return episodes_.size(); }
  bool can_sample(int k) const;

  // Uniform over episodes with >= k steps, then uniform over start offsets.
  // Returns a k-step slice with k+1 observations.
  told::Trajectory sample(int k, nn::Rng& rng) const;

  const std::deque<Episode>& episodes() const { return episodes_; }

 private:
  std::size_t capacity_;
  std::size_t transitions_ = 0;
  std::deque<Episode> episodes_;
};

}  // namespace ccem::train

#endif  // CCEM_TRAIN_REPLAY_HPP_
