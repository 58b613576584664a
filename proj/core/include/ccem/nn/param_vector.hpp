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

#ifndef CCEM_NN_PARAM_VECTOR_HPP_
#define CCEM_NN_PARAM_VECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ccem::nn {

// One named slice of the flat parameter array.
struct Segment {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

// Immutable-after-build description of how a flat parameter array is split
// into named segments. Shared by online params, target params, gradients and
// optimizer moments so they all agree on offsets.
class ParamLayout {
 public:
  // Returns the id of the new segment. Names must be unique.
  int add(std::string name, std::vector<int> shape);

  int id(std::string_view name) const;          // throws Error if missing
  bool contains(std::string_view name) const;
  const Segment& segment(int id) const { return segments_[static_cast<std::size_t>(id)]; }
  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t total_size() const { return total_; }

 private:
  std::vector<Segment> segments_;
  std::unordered_map<std::string, int> by_name_;
  std::size_t total_ = 0;
};

using LayoutPtr = std::shared_ptr<const ParamLayout>;

// Flat array of doubles carved into named segments by a shared layout.
// Value semantics: copying a ParamVector deep-copies the values.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(LayoutPtr layout);

  const ParamLayout& layout() const { return *layout_; }
  LayoutPtr layout_ptr() const { return layout_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> seg(int id);
  std::span<const double> seg(int id) const;
  std::span<double> seg(std::string_view name) { return seg(layout_->id(name)); }
  std::span<const double> seg(std::string_view name) const { return seg(layout_->id(name)); }

  void zero();
  bool all_finite() const;
  // Name of the first segment containing a non-finite entry, or "" if clean.
  std::string first_non_finite_segment() const;

 private:
  LayoutPtr layout_;
  std::vector<double> values_;
};

// Checkpoint serialization: `<stem>.bin` holds the raw little-endian float64
// array, `<stem>.manifest` is a plain-text segment table (name, shape,
// offset, size).
void save_checkpoint(const ParamVector& params, const std::string& stem);

// Loads a checkpoint into an existing vector; the manifest must match the
// vector's layout segment-for-segment.
void load_checkpoint(ParamVector& params, const std::string& stem);

// Reads a checkpoint standalone, reconstructing the layout from the manifest.
ParamVector read_checkpoint(const std::string& stem);

}  // namespace ccem::nn

#endif  // CCEM_NN_PARAM_VECTOR_HPP_
