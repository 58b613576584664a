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

#include <cmath>
#include <filesystem>
#include <memory>
#include <vector>

#include "ccem/error.hpp"
#include "ccem/nn/adam.hpp"
#include "ccem/nn/grad_check.hpp"
#include "ccem/nn/mlp.hpp"
#include "ccem/nn/param_vector.hpp"
#include "ccem/nn/rng.hpp"
#include "doctest.h"

namespace {

using namespace ccem;

struct Net {
  nn::Mlp mlp;
  nn::LayoutPtr layout;
  nn::ParamVector params;
};

Net make_net(const nn::MlpSpec& spec, std::uint64_t seed) {
  Net n;
  n.mlp = nn::Mlp("t", spec);
  auto layout = std::make_shared<nn::ParamLayout>();
  n.mlp.declare(*layout);
  n.mlp.bind(*layout);
  n.layout = layout;
  n.params = nn::ParamVector(n.layout);
  nn::Rng rng = nn::make_rng(seed, 1);
  n.mlp.init_params(n.params, rng);
  return n;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "ccem_nn_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("param layout carves named segments") {
  nn::ParamLayout layout;
  const int a = layout.add("a/w", {2, 3});
  const int b = layout.add("b", {4});
  CHECK(layout.total_size() == 10);
  CHECK(layout.id("a/w") == a);
  CHECK(layout.id("b") == b);
  CHECK(layout.contains("a/w"));
  CHECK(!layout.contains("missing"));
  CHECK(layout.segment(a).size == 6);
  CHECK(layout.segment(b).offset == 6);
  CHECK_THROWS_AS(layout.id("missing"), Error);
  CHECK_THROWS_AS(layout.add("a/w", {1}), Error);
}

TEST_CASE("param vector zero and finiteness") {
  auto layout = std::make_shared<nn::ParamLayout>();
  layout->add("x", {3});
  layout->add("y", {2});
  nn::ParamVector p(layout);
  CHECK(p.size() == 5);
  p.seg("x")[1] = 7.0;
  p.seg("y")[0] = -2.0;
  CHECK(p.all_finite());
  CHECK(p.first_non_finite_segment().empty());
  p.seg("y")[1] = std::nan("");
  CHECK(!p.all_finite());
  CHECK(p.first_non_finite_segment() == "y");
  p.zero();
  CHECK(p.all_finite());
  for (double v : p.values()) CHECK(v == 0.0);
}

TEST_CASE("checkpoint round trip is bitwise") {
  auto layout = std::make_shared<nn::ParamLayout>();
  layout->add("enc/w0", {4, 2});
  layout->add("enc/b0", {4});
  nn::ParamVector p(layout);
  nn::Rng rng = nn::make_rng(3, 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : p.values()) v = u(rng);
  const std::string stem = (scratch_dir() / "ckpt").string();
  nn::save_checkpoint(p, stem);

  nn::ParamVector q(layout);
  nn::load_checkpoint(q, stem);
  REQUIRE(q.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(q.values()[i] == p.values()[i]);

  nn::ParamVector standalone = nn::read_checkpoint(stem);
  REQUIRE(standalone.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(standalone.values()[i] == p.values()[i]);
  }
  CHECK(standalone.layout().segment(0).name == "enc/w0");

  auto other = std::make_shared<nn::ParamLayout>();
  other->add("different", {12});
  nn::ParamVector mismatched(other);
  CHECK_THROWS_AS(nn::load_checkpoint(mismatched, stem), Error);
}

TEST_CASE("mlp forward matches a hand-evaluated network") {
  nn::MlpSpec spec;
  spec.input_dim = 2;
  spec.hidden_dims = {2};
  spec.output_dim = 1;
  spec.activation = nn::Activation::kElu;
  Net n = make_net(spec, 0);

  // Row-major (out x in) weights.
  const double w0[] = {0.5, -0.25, 0.1, 0.3};
  const double b0[] = {0.1, -0.2};
  const double w1[] = {1.0, -0.5};
  const double b1[] = {0.05};
  std::copy(std::begin(w0), std::end(w0), n.params.seg("t/w0").begin());
  std::copy(std::begin(b0), std::end(b0), n.params.seg("t/b0").begin());
  std::copy(std::begin(w1), std::end(w1), n.params.seg("t/w1").begin());
  std::copy(std::begin(b1), std::end(b1), n.params.seg("t/b1").begin());

  const std::vector<double> x = {0.4, -0.8};
  // Pre-activations: [0.5, -0.4]; ELU keeps 0.5, maps -0.4 to e^{-0.4} - 1.
  // Output: 1.0 * 0.5 - 0.5 * (e^{-0.4} - 1) + 0.05.
  const double expected = 0.55 - 0.5 * (std::exp(-0.4) - 1.0);
  std::vector<double> y = n.mlp.forward(n.params, x);
  REQUIRE(y.size() == 1);
  CHECK(y[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("identity activation makes the mlp affine") {
  nn::MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden_dims = {};
  spec.output_dim = 2;
  spec.activation = nn::Activation::kIdentity;
  Net n = make_net(spec, 1);
  const std::vector<double> x = {0.2, -0.7, 1.5};
  std::vector<double> y = n.mlp.forward(n.params, x);
  auto w = n.params.seg("t/w0");
  auto b = n.params.seg("t/b0");
  for (int r = 0; r < 2; ++r) {
    double acc = b[static_cast<std::size_t>(r)];
    for (int c = 0; c < 3; ++c) acc += w[static_cast<std::size_t>(r * 3 + c)] * x[static_cast<std::size_t>(c)];
    CHECK(y[static_cast<std::size_t>(r)] == doctest::Approx(acc).epsilon(1e-15));
  }
}

TEST_CASE("zero parameters give zero output") {
  nn::MlpSpec spec;
  spec.input_dim = 4;
  spec.hidden_dims = {5, 5};
  spec.output_dim = 3;
  Net n = make_net(spec, 2);
  n.params.zero();
  std::vector<double> y = n.mlp.forward(n.params, std::vector<double>{1.0, -2.0, 0.5, 3.0});
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("output layer norm centers and normalizes") {
  nn::MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden_dims = {8};
  spec.output_dim = 6;
  spec.output_layernorm = true;
  Net n = make_net(spec, 4);
  std::vector<double> y = n.mlp.forward(n.params, std::vector<double>{0.3, -1.1, 0.9});
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size());
  CHECK(std::abs(mean) < 1e-12);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-3));  // eps in the denominator
}

TEST_CASE("mlp backward matches finite differences") {
  nn::MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden_dims = {4};
  spec.output_dim = 2;
  spec.output_layernorm = true;
  Net n = make_net(spec, 5);
  const std::vector<double> x = {0.1, -0.6, 1.2};

  // loss = 0.5 ||y||^2, so y_grad = y.
  nn::MlpCache cache;
  std::vector<double> y = n.mlp.forward(n.params, x, &cache);
  nn::ParamVector grad(n.layout);
  n.mlp.backward(n.params, cache, y, 1.0, &grad, {});

  auto loss_fn = [&](const nn::ParamVector& p) {
    std::vector<double> out = n.mlp.forward(p, x);
    double acc = 0.0;
    for (double v : out) acc += 0.5 * v * v;
    return acc;
  };
  nn::GradCheckReport report = nn::finite_diff_check(loss_fn, n.params, grad);
  CHECK(report.pass);
  CHECK(report.entries_checked == n.params.size());
}

TEST_CASE("mlp input gradient matches finite differences") {
  nn::MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden_dims = {4};
  spec.output_dim = 2;
  Net n = make_net(spec, 6);
  std::vector<double> x = {0.4, 0.9, -0.3};

  nn::MlpCache cache;
  std::vector<double> y = n.mlp.forward(n.params, x, &cache);
  std::vector<double> x_grad(x.size(), 0.0);
  n.mlp.backward(n.params, cache, y, 1.0, nullptr, x_grad);

  const double h = 1e-6;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    auto half = [&](const std::vector<double>& probe) {
      std::vector<double> out = n.mlp.forward(n.params, probe);
      double acc = 0.0;
      for (double v : out) acc += 0.5 * v * v;
      return acc;
    };
    const double numeric = (half(xp) - half(xm)) / (2.0 * h);
    CHECK(x_grad[i] == doctest::Approx(numeric).epsilon(1e-5));
  }
}

TEST_CASE("grad check flags a corrupted gradient") {
  nn::MlpSpec spec;
  spec.input_dim = 2;
  spec.hidden_dims = {3};
  spec.output_dim = 1;
  Net n = make_net(spec, 7);
  const std::vector<double> x = {0.5, -0.5};

  nn::MlpCache cache;
  std::vector<double> y = n.mlp.forward(n.params, x, &cache);
  nn::ParamVector grad(n.layout);
  n.mlp.backward(n.params, cache, y, 1.0, &grad, {});
  grad.seg("t/w0")[0] += 0.37;  // deliberate corruption

  auto loss_fn = [&](const nn::ParamVector& p) {
    std::vector<double> out = n.mlp.forward(p, x);
    return 0.5 * out[0] * out[0];
  };
  nn::GradCheckReport report = nn::finite_diff_check(loss_fn, n.params, grad);
  CHECK(!report.pass);
  CHECK(report.worst_segment == "t/w0");
}

TEST_CASE("adam first step approximates lr times sign") {
  auto layout = std::make_shared<nn::ParamLayout>();
  layout->add("p", {3});
  nn::ParamVector params(layout);
  params.seg("p")[0] = 1.0;
  params.seg("p")[1] = -2.0;
  params.seg("p")[2] = 0.5;
  nn::ParamVector grad(layout);
  grad.seg("p")[0] = 0.3;
  grad.seg("p")[1] = -4.0;
  grad.seg("p")[2] = 0.0;

  const double lr = 0.1;
  nn::AdamOptimizer opt(*layout, {}, lr);
  opt.step(params, grad);
  CHECK(params.seg("p")[0] == doctest::Approx(1.0 - lr).epsilon(1e-5));
  CHECK(params.seg("p")[1] == doctest::Approx(-2.0 + lr).epsilon(1e-5));
  CHECK(params.seg("p")[2] == 0.5);  // zero gradient leaves the entry alone
}

TEST_CASE("adam touches only its named segments") {
  auto layout = std::make_shared<nn::ParamLayout>();
  layout->add("a", {2});
  layout->add("b", {2});
  nn::ParamVector params(layout);
  params.seg("a")[0] = 1.0;
  params.seg("b")[0] = 1.0;
  nn::ParamVector grad(layout);
  grad.seg("a")[0] = 1.0;
  grad.seg("b")[0] = 1.0;

  nn::AdamOptimizer opt(*layout, {"a"}, 0.01);
  opt.step(params, grad);
  CHECK(params.seg("a")[0] != 1.0);
  CHECK(params.seg("b")[0] == 1.0);
}

TEST_CASE("adam rejects non-finite gradients") {
  auto layout = std::make_shared<nn::ParamLayout>();
  layout->add("p", {2});
  nn::ParamVector params(layout);
  nn::ParamVector grad(layout);
  grad.seg("p")[1] = std::numeric_limits<double>::infinity();
  nn::AdamOptimizer opt(*layout, {}, 0.01);
  CHECK_THROWS_AS(opt.step(params, grad), NonFiniteError);
}

TEST_CASE("ema update arithmetic") {
  std::vector<double> target = {2.0, -1.0};
  const std::vector<double> online = {1.0, 3.0};
  nn::ema_update(target, online, 0.25);
  CHECK(target[0] == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(target[1] == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<double> frozen = {0.7, 0.9};
  nn::ema_update(frozen, online, 0.0);
  CHECK(frozen[0] == 0.7);
  CHECK(frozen[1] == 0.9);

  std::vector<double> copied = {0.7, 0.9};
  nn::ema_update(copied, online, 1.0);
  CHECK(copied[0] == 1.0);
  CHECK(copied[1] == 3.0);

  std::vector<double> bad = {0.0};
  CHECK_THROWS_AS(nn::ema_update(bad, std::vector<double>{1.0}, 1.5), Error);
}

TEST_CASE("rng streams are deterministic and distinct") {
  nn::Rng a = nn::make_rng(42, 3);
  nn::Rng b = nn::make_rng(42, 3);
  CHECK(a() == b());
  CHECK(a() == b());
  nn::Rng a2 = nn::make_rng(42, 3);
  nn::Rng c = nn::make_rng(42, 4);
  CHECK(a2() != c());  // streams decorrelate from the first draw
}
