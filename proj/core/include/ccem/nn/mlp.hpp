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

#ifndef CCEM_NN_MLP_HPP_
#define CCEM_NN_MLP_HPP_

#include <span>
#include <string>
#include <vector>

#include "ccem/nn/param_vector.hpp"
#include "ccem/nn/rng.hpp"

namespace ccem::nn {

enum class Activation { kElu, kTanh, kIdentity };

// Architecture of one fully-connected network. Hidden layers apply
// `activation`; the output layer is linear, optionally followed by a
// non-affine layer normalization.
struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden_dims;
  int output_dim = 0;
  Activation activation = Activation::kElu;
  bool output_layernorm = false;

  int num_layers() const { return static_cast<int>(hidden_dims.size()) + 1; }
  void validate(const std::string& context) const;  // all dims >= 1
};

// Forward-pass activations kept for the backward pass.
struct MlpCache {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;    // per layer, before activation
  std::vector<std::vector<double>> post;   // per layer, after activation
  // Layer-norm statistics of the output layer (when enabled).
  double ln_rstd = 0.0;
  std::vector<double> ln_centered;         // y - mean(y)
};

// A multilayer perceptron whose weights live as named segments ("<prefix>/w0",
// "<prefix>/b0", ...) inside a shared ParamVector. Forward passes are pure
// functions of (params, input); gradients are hand-rolled reverse mode.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::string prefix, MlpSpec spec);

  // Registers this network's segments. Call once per layout.
  void declare(ParamLayout& layout);
  // Resolves segment ids against a finished layout (after declare).
  void bind(const ParamLayout& layout);

  // Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] for weights and biases.
  void init_params(ParamVector& params, Rng& rng) const;

  const MlpSpec& spec() const { return spec_; }
  const std::string& prefix() const { return prefix_; }
  int input_dim() const { return spec_.input_dim; }
  int output_dim() const { return spec_.output_dim; }

  // y = f(params, x). `cache`, when provided, is filled for backward().
  void forward(const ParamVector& params, std::span<const double> x,
               std::vector<double>& y, MlpCache* cache = nullptr) const;
  std::vector<double> forward(const ParamVector& params,
                              std::span<const double> x,
                              MlpCache* cache = nullptr) const;

  // Reverse-mode gradients of <y, y_grad>. Accumulates scale * d/dparams into
  // `grad` (skipped when null) and scale * d/dx into `x_grad` (skipped when
  // empty). `cache` must come from a forward() on the same params and input.
  void backward(const ParamVector& params, const MlpCache& cache,
                std::span<const double> y_grad, double scale,
                ParamVector* grad, std::span<double> x_grad) const;

  std::size_t param_count() const;

 private:
  std::string prefix_;
  MlpSpec spec_;
  std::vector<int> weight_ids_;
  std::vector<int> bias_ids_;
  bool bound_ = false;
};

double apply_activation(Activation act, double x);
double activation_grad(Activation act, double pre);

}  // namespace ccem::nn

#endif  // CCEM_NN_MLP_HPP_
