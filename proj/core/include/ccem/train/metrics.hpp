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

#ifndef CCEM_TRAIN_METRICS_HPP_
#define CCEM_TRAIN_METRICS_HPP_

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace ccem::train {

struct MetricsRow {
  std::int64_t env_step = 0;
  std::string event;  // "train" or "eval"
  double episode_return = 0.0;
  double loss_q = 0.0;
  double loss_reward = 0.0;
  double loss_consistency = 0.0;
  double loss_policy = 0.0;
  double loss_inverse = 0.0;
  double loss_contrastive = 0.0;
  double intrinsic_mean = 0.0;
  double elite_score_mean = 0.0;
  double wall_clock_s = 0.0;
};

// Shortest decimal string that parses back to exactly `v`, so identical runs
// yield byte-identical files.
std::string format_double(double v);

// CSV sink for the metrics stream; writes the header on construction.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);

  void write(const MetricsRow& row);
  void flush();
  const std::string& path() const { return path_; }

  static std::string header();

 private:
  std::string path_;
  std::ofstream out_;
};

std::vector<MetricsRow> read_metrics_csv(const std::string& path);

}  // namespace ccem::train

#endif  // CCEM_TRAIN_METRICS_HPP_
