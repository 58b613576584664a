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

#ifndef CCEM_ERROR_HPP_
#define CCEM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ccem {

// Base class for all library errors. Messages name the offending entity
// (parameter segment, config key, ...) so callers can report precisely.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or dimension mismatch between a spec and the data fed to it.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

// Raised when training produces a non-finite loss or gradient.
class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(const std::string& what) : Error(what) {}
};

// Raised by the planner when every candidate scores -inf.
class DegenerateModelError : public Error {
 public:
  explicit DegenerateModelError(const std::string& what) : Error(what) {}
};

// Invalid experiment configuration (unknown key, bad value, parse failure).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace ccem

#endif  // CCEM_ERROR_HPP_
