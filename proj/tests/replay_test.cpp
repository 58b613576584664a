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

#include <set>
#include <vector>

#include "ccem/error.hpp"
#include "ccem/nn/rng.hpp"
#include "ccem/train/replay.hpp"
#include "doctest.h"

namespace {

using namespace ccem;

// Episode whose observations encode (episode id, step index) so sampled
// slices can be traced back to their source.
train::Episode tagged_episode(int id, int length) {
  train::Episode ep;
  for (int j = 0; j <= length; ++j) {
    ep.observations.push_back({static_cast<double>(id), static_cast<double>(j)});
  }
  for (int j = 0; j < length; ++j) {
    ep.actions.push_back({static_cast<double>(id) + 0.5});
    ep.rewards.push_back(static_cast<double>(j));
  }
  return ep;
}

}  // namespace

TEST_CASE("episode shape validation") {
  train::Episode ep = tagged_episode(0, 3);
  ep.validate();
  ep.rewards.pop_back();
  CHECK_THROWS_AS(ep.validate(), DimensionError);
}

TEST_CASE("buffer counts transitions and evicts whole episodes") {
  train::ReplayBuffer buf(10);
  buf.add_episode(tagged_episode(0, 6));
  CHECK(buf.size() == 6);
  CHECK(buf.num_episodes() == 1);
  buf.add_episode(tagged_episode(1, 6));
  // 12 > 10: the oldest episode leaves as a unit.
  CHECK(buf.size() == 6);
  CHECK(buf.num_episodes() == 1);
  CHECK(buf.episodes().front().observations[0][0] == 1.0);
}

TEST_CASE("sampling requires a long enough episode") {
  train::ReplayBuffer buf(100);
  nn::Rng rng = nn::make_rng(0, 5);
  CHECK(!buf.can_sample(1));
  CHECK_THROWS_AS(buf.sample(1, rng), Error);
  buf.add_episode(tagged_episode(0, 2));
  CHECK(buf.can_sample(2));
  CHECK(!buf.can_sample(3));
  CHECK_THROWS_AS(buf.sample(3, rng), Error);
}

TEST_CASE("sampled slices are contiguous and never cross episodes") {
  train::ReplayBuffer buf(1000);
  buf.add_episode(tagged_episode(0, 5));
  buf.add_episode(tagged_episode(1, 5));
  nn::Rng rng = nn::make_rng(1, 5);

  std::set<int> seen_ids;
  for (int trial = 0; trial < 200; ++trial) {
    told::Trajectory t = buf.sample(3, rng);
    REQUIRE(t.observations.size() == 4);
    REQUIRE(t.actions.size() == 3);
    REQUIRE(t.rewards.size() == 3);

    const int id = static_cast<int>(t.observations[0][0]);
    seen_ids.insert(id);
    const int start = static_cast<int>(t.observations[0][1]);
    for (int j = 0; j < 4; ++j) {
      CHECK(t.observations[static_cast<std::size_t>(j)][0] == id);  // one episode only
      CHECK(t.observations[static_cast<std::size_t>(j)][1] == start + j);
    }
    for (int j = 0; j < 3; ++j) {
      CHECK(t.rewards[static_cast<std::size_t>(j)] == static_cast<double>(start + j));
    }
    CHECK(start + 3 <= 5);  // never runs off the episode tail
  }
  CHECK(seen_ids.size() == 2);  // both episodes get sampled
}

TEST_CASE("full episode slices are exact copies") {
  train::ReplayBuffer buf(100);
  buf.add_episode(tagged_episode(7, 3));
  nn::Rng rng = nn::make_rng(2, 5);
  told::Trajectory t = buf.sample(3, rng);  // only one possible slice
  const train::Episode& ep = buf.episodes().front();
  for (std::size_t j = 0; j < t.observations.size(); ++j) {
    CHECK(t.observations[j] == ep.observations[j]);
  }
  for (std::size_t j = 0; j < t.actions.size(); ++j) {
    CHECK(t.actions[j] == ep.actions[j]);
    CHECK(t.rewards[j] == ep.rewards[j]);
  }
}
