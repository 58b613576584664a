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

#include "ccem/nn/param_vector.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ccem/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace ccem::nn {

int ParamLayout::add(std::string name, std::vector<int> shape) {
  if (by_name_.count(name) != 0) {
    throw Error("ParamLayout: duplicate segment name '" + name + "'");
  }
  std::size_t size = 1;
  for (int d : shape) {
    if (d < 1) throw Error("ParamLayout: segment '" + name + "' has dim < 1");
    size *= static_cast<std::size_t>(d);
  }
  Segment s;
  s.name = name;
  s.shape = std::move(shape);
  s.offset = total_;
  s.size = size;
  total_ += size;
  int id = static_cast<int>(segments_.size());
  by_name_.emplace(std::move(name), id);
  segments_.push_back(std::move(s));
  return id;
}

int ParamLayout::id(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) {
    throw Error("ParamLayout: unknown segment '" + std::string(name) + "'");
  }
  return it->second;
}

bool ParamLayout::contains(std::string_view name) const {
  return by_name_.count(std::string(name)) != 0;
}

ParamVector::ParamVector(LayoutPtr layout)
    : layout_(std::move(layout)), values_(layout_->total_size(), 0.0) {}

std::span<double> ParamVector::seg(int id) {
  const Segment& s = layout_->segment(id);
  return {values_.data() + s.offset, s.size};
}

std::span<const double> ParamVector::seg(int id) const {
  const Segment& s = layout_->segment(id);
  return {values_.data() + s.offset, s.size};
}

void ParamVector::zero() { std::fill(values_.begin(), values_.end(), 0.0); }

bool ParamVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string ParamVector::first_non_finite_segment() const {
  for (const Segment& s : layout_->segments()) {
    for (std::size_t i = 0; i < s.size; ++i) {
      if (!std::isfinite(values_[s.offset + i])) return s.name;
    }
  }
  return "";
}

namespace {

std::string shape_string(const std::vector<int>& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += "x";
    out += std::to_string(shape[i]);
  }
  return out;
}

std::vector<int> parse_shape(const std::string& text) {
  std::vector<int> shape;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find('x', pos);
    if (next == std::string::npos) next = text.size();
    shape.push_back(std::stoi(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return shape;
}

}  // namespace

void save_checkpoint(const ParamVector& params, const std::string& stem) {
  {
    std::ofstream bin(stem + ".bin", std::ios::binary);
    if (!bin) throw Error("cannot open '" + stem + ".bin' for writing");
    bin.write(reinterpret_cast<const char*>(params.values().data()),
              static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!bin) throw Error("short write to '" + stem + ".bin'");
  }
  std::ofstream man(stem + ".manifest");
  if (!man) throw Error("cannot open '" + stem + ".manifest' for writing");
  man << "ccem-params v1 float64 little-endian total=" << params.size() << "\n";
  for (const Segment& s : params.layout().segments()) {
    man << s.name << " " << shape_string(s.shape) << " " << s.offset << " "
        << s.size << "\n";
  }
}

namespace {

ParamLayout read_manifest(const std::string& stem, std::size_t* total_out) {
  std::ifstream man(stem + ".manifest");
  if (!man) throw Error("cannot open '" + stem + ".manifest'");
  std::string header;
  std::getline(man, header);
  if (header.rfind("ccem-params v1", 0) != 0) {
    throw Error("'" + stem + ".manifest': unrecognized header");
  }
  std::size_t total = 0;
  if (auto pos = header.find("total="); pos != std::string::npos) {
    total = std::stoull(header.substr(pos + 6));
  }
  ParamLayout layout;
  std::string line;
  while (std::getline(man, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name, shape_text;
    std::size_t offset = 0, size = 0;
    if (!(ls >> name >> shape_text >> offset >> size)) {
      throw Error("'" + stem + ".manifest': malformed line: " + line);
    }
    int id = layout.add(name, parse_shape(shape_text));
    const Segment& s = layout.segment(id);
    if (s.offset != offset || s.size != size) {
      throw Error("'" + stem + ".manifest': inconsistent offsets for '" + name + "'");
    }
  }
  if (layout.total_size() != total) {
    throw Error("'" + stem + ".manifest': total mismatch");
  }
  *total_out = total;
  return layout;
}

void read_values(const std::string& stem, std::span<double> out) {
  std::ifstream bin(stem + ".bin", std::ios::binary);
  if (!bin) throw Error("cannot open '" + stem + ".bin'");
  bin.read(reinterpret_cast<char*>(out.data()),
           static_cast<std::streamsize>(out.size() * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(out.size() * sizeof(double))) {
    throw Error("'" + stem + ".bin': short read");
  }
}

}  // namespace

void load_checkpoint(ParamVector& params, const std::string& stem) {
  std::size_t total = 0;
  ParamLayout from_disk = read_manifest(stem, &total);
  const auto& want = params.layout().segments();
  const auto& got = from_disk.segments();
  if (want.size() != got.size() || total != params.size()) {
    throw Error("checkpoint '" + stem + "' does not match parameter layout");
  }
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i].name != got[i].name || want[i].size != got[i].size ||
        want[i].offset != got[i].offset) {
      throw Error("checkpoint '" + stem + "': segment mismatch at '" +
                  got[i].name + "'");
    }
  }
  read_values(stem, params.values());
}

ParamVector read_checkpoint(const std::string& stem) {
  std::size_t total = 0;
  auto layout = std::make_shared<ParamLayout>(read_manifest(stem, &total));
  ParamVector params(layout);
  read_values(stem, params.values());
  return params;
}

}  // namespace ccem::nn
