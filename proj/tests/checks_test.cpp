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

#include <string>
#include <vector>

#include "ccem/checks.hpp"
#include "doctest.h"

namespace {

using namespace ccem;

void expect_all(const std::vector<checks::CheckResult>& results) {
  CHECK(!results.empty());
  for (const auto& r : results) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.pass);
  }
}

}  // namespace

TEST_CASE("finite differences approve every loss family") {
  // Fewer instances than the acceptance gate; same oracle.
  expect_all(checks::run_gradient_suite(0, 5));
}

TEST_CASE("stop gradient zeros are exact") {
  expect_all(checks::run_stop_gradient_suite(0, 10));
}

TEST_CASE("planner recovers quadratic optima against the grid oracle") {
  checks::CheckResult r = checks::run_cem_grid_recovery(0, 20);
  INFO(r.detail);
  CHECK(r.pass);
}

TEST_CASE("planner matches exhaustive search on the toy linear model") {
  checks::CheckResult r = checks::run_cem_toy_model(0, 20);
  INFO(r.detail);
  CHECK(r.pass);
}

TEST_CASE("intrinsic reward law identities") {
  expect_all(checks::run_intrinsic_law(0));
}

TEST_CASE("infonce identities") {
  expect_all(checks::run_infonce_identities(0));
}

TEST_CASE("ema identity") {
  expect_all(checks::run_ema_identity(0));
}

TEST_CASE("scoring variant structure") {
  expect_all(checks::run_scoring_structure(0));
}
