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

#include "ccem/train/metrics.hpp"

#include <charconv>
#include <sstream>

#include "ccem/error.hpp"

namespace ccem::train {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

std::string MetricsWriter::header() {
  return "env_step,event,episode_return,loss_q,loss_reward,loss_consistency,"
         "loss_policy,loss_inverse,loss_contrastive,intrinsic_mean,"
         "elite_score_mean,wall_clock_s";
}

MetricsWriter::MetricsWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw Error("MetricsWriter: cannot open '" + path + "'");
  out_ << header() << '\n';
}

void MetricsWriter::write(const MetricsRow& row) {
  out_ << row.env_step << ',' << row.event << ','
       << format_double(row.episode_return) << ',' << format_double(row.loss_q)
       << ',' << format_double(row.loss_reward) << ','
       << format_double(row.loss_consistency) << ','
       << format_double(row.loss_policy) << ',' << format_double(row.loss_inverse)
       << ',' << format_double(row.loss_contrastive) << ','
       << format_double(row.intrinsic_mean) << ','
       << format_double(row.elite_score_mean) << ','
       << format_double(row.wall_clock_s) << '\n';
  if (!out_) throw Error("MetricsWriter: write failed on '" + path_ + "'");
}

void MetricsWriter::flush() { out_.flush(); }

namespace {

double parse_double(const std::string& s, const std::string& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("read_metrics_csv: bad number '" + s + "' in " + path);
  }
  return v;
}

}  // namespace

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_metrics_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != MetricsWriter::header()) {
    throw Error("read_metrics_csv: unexpected header in '" + path + "'");
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 12) {
      throw Error("read_metrics_csv: expected 12 fields, got " +
                  std::to_string(fields.size()) + " in " + path);
    }
    MetricsRow row;
    row.env_step = std::stoll(fields[0]);
    row.event = fields[1];
    row.episode_return = parse_double(fields[2], path);
    row.loss_q = parse_double(fields[3], path);
    row.loss_reward = parse_double(fields[4], path);
    row.loss_consistency = parse_double(fields[5], path);
    row.loss_policy = parse_double(fields[6], path);
    row.loss_inverse = parse_double(fields[7], path);
    row.loss_contrastive = parse_double(fields[8], path);
    row.intrinsic_mean = parse_double(fields[9], path);
    row.elite_score_mean = parse_double(fields[10], path);
    row.wall_clock_s = parse_double(fields[11], path);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ccem::train
