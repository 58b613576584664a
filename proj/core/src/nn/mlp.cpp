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

#include "ccem/nn/mlp.hpp"

#include <cmath>

#include "ccem/error.hpp"

namespace ccem::nn {

namespace {
constexpr double kLayerNormEps = 1e-5;
}

double apply_activation(Activation act, double x) {
  switch (act) {
    case Activation::kElu: return x > 0.0 ? x : std::expm1(x);
    case Activation::kTanh: return std::tanh(x);
    case Activation::kIdentity: return x;
  }
  return x;
}

double activation_grad(Activation act, double pre) {
  switch (act) {
    case Activation::kElu: return pre > 0.0 ? 1.0 : std::exp(pre);
    case Activation::kTanh: {
      double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

void MlpSpec::validate(const std::string& context) const {
  if (input_dim < 1) throw DimensionError(context + ": input_dim < 1");
  if (output_dim < 1) throw DimensionError(context + ": output_dim < 1");
  for (int h : hidden_dims) {
    if (h < 1) throw DimensionError(context + ": hidden dim < 1");
  }
}

Mlp::Mlp(std::string prefix, MlpSpec spec)
    : prefix_(std::move(prefix)), spec_(std::move(spec)) {
  spec_.validate(prefix_);
}

void Mlp::declare(ParamLayout& layout) {
  weight_ids_.clear();
  bias_ids_.clear();
  int in = spec_.input_dim;
  for (int l = 0; l < spec_.num_layers(); ++l) {
    int out = l < static_cast<int>(spec_.hidden_dims.size())
                  ? spec_.hidden_dims[static_cast<std::size_t>(l)]
                  : spec_.output_dim;
    weight_ids_.push_back(layout.add(prefix_ + "/w" + std::to_string(l), {out, in}));
    bias_ids_.push_back(layout.add(prefix_ + "/b" + std::to_string(l), {out}));
    in = out;
  }
  bound_ = true;
}

void Mlp::bind(const ParamLayout& layout) {
  weight_ids_.clear();
  bias_ids_.clear();
  for (int l = 0; l < spec_.num_layers(); ++l) {
    weight_ids_.push_back(layout.id(prefix_ + "/w" + std::to_string(l)));
    bias_ids_.push_back(layout.id(prefix_ + "/b" + std::to_string(l)));
  }
  bound_ = true;
}

void Mlp::init_params(ParamVector& params, Rng& rng) const {
  int in = spec_.input_dim;
  for (int l = 0; l < spec_.num_layers(); ++l) {
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : params.seg(weight_ids_[static_cast<std::size_t>(l)])) v = dist(rng);
    for (double& v : params.seg(bias_ids_[static_cast<std::size_t>(l)])) v = dist(rng);
    in = l < static_cast<int>(spec_.hidden_dims.size())
             ? spec_.hidden_dims[static_cast<std::size_t>(l)]
             : spec_.output_dim;
  }
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  int in = spec_.input_dim;
  for (int l = 0; l < spec_.num_layers(); ++l) {
    int out = l < static_cast<int>(spec_.hidden_dims.size())
                  ? spec_.hidden_dims[static_cast<std::size_t>(l)]
                  : spec_.output_dim;
    n += static_cast<std::size_t>(out) * static_cast<std::size_t>(in + 1);
    in = out;
  }
  return n;
}

void Mlp::forward(const ParamVector& params, std::span<const double> x,
                  std::vector<double>& y, MlpCache* cache) const {
  if (!bound_) throw Error("Mlp '" + prefix_ + "': not bound to a layout");
  if (static_cast<int>(x.size()) != spec_.input_dim) {
    throw DimensionError("Mlp '" + prefix_ + "': input size " +
                         std::to_string(x.size()) + " != input_dim " +
                         std::to_string(spec_.input_dim));
  }
  const int num_layers = spec_.num_layers();
  if (cache != nullptr) {
    cache->input.assign(x.begin(), x.end());
    cache->pre.resize(static_cast<std::size_t>(num_layers));
    cache->post.resize(static_cast<std::size_t>(num_layers));
  }

  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  int in = spec_.input_dim;
  for (int l = 0; l < num_layers; ++l) {
    const bool is_output = l == num_layers - 1;
    const int out = is_output ? spec_.output_dim
                              : spec_.hidden_dims[static_cast<std::size_t>(l)];
    auto w = params.seg(weight_ids_[static_cast<std::size_t>(l)]);
    auto b = params.seg(bias_ids_[static_cast<std::size_t>(l)]);
    next.assign(static_cast<std::size_t>(out), 0.0);
    const double* wp = w.data();
    for (int r = 0; r < out; ++r) {
      double acc = b[static_cast<std::size_t>(r)];
      const double* row = wp + static_cast<std::size_t>(r) * static_cast<std::size_t>(in);
      for (int c = 0; c < in; ++c) acc += row[c] * cur[static_cast<std::size_t>(c)];
      next[static_cast<std::size_t>(r)] = acc;
    }
    if (cache != nullptr) cache->pre[static_cast<std::size_t>(l)] = next;
    if (!is_output) {
      for (double& v : next) v = apply_activation(spec_.activation, v);
    }
    if (cache != nullptr) cache->post[static_cast<std::size_t>(l)] = next;
    cur.swap(next);
    in = out;
  }

  if (spec_.output_layernorm) {
    const std::size_t n = cur.size();
    double mean = 0.0;
    for (double v : cur) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) {
      centered[i] = cur[i] - mean;
      var += centered[i] * centered[i];
    }
    var /= static_cast<double>(n);
    double rstd = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t i = 0; i < n; ++i) cur[i] = centered[i] * rstd;
    if (cache != nullptr) {
      cache->ln_rstd = rstd;
      cache->ln_centered = std::move(centered);
    }
  }
  y = std::move(cur);
}

std::vector<double> Mlp::forward(const ParamVector& params,
                                 std::span<const double> x,
                                 MlpCache* cache) const {
  std::vector<double> y;
  forward(params, x, y, cache);
  return y;
}

void Mlp::backward(const ParamVector& params, const MlpCache& cache,
                   std::span<const double> y_grad, double scale,
                   ParamVector* grad, std::span<double> x_grad) const {
  if (static_cast<int>(y_grad.size()) != spec_.output_dim) {
    throw DimensionError("Mlp '" + prefix_ + "': y_grad size " +
                         std::to_string(y_grad.size()) + " != output_dim " +
                         std::to_string(spec_.output_dim));
  }
  if (!x_grad.empty() && static_cast<int>(x_grad.size()) != spec_.input_dim) {
    throw DimensionError("Mlp '" + prefix_ + "': x_grad size " +
                         std::to_string(x_grad.size()) + " != input_dim " +
                         std::to_string(spec_.input_dim));
  }
  const int num_layers = spec_.num_layers();
  std::vector<double> delta(y_grad.begin(), y_grad.end());

  if (spec_.output_layernorm) {
    // d/dy of u = (y - mean) * rstd with u = centered * rstd:
    //   dy_i = rstd * (g_i - mean(g) - u_i * mean(g . u))
    const std::size_t n = delta.size();
    const double rstd = cache.ln_rstd;
    double g_mean = 0.0, gu_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double u = cache.ln_centered[i] * rstd;
      g_mean += delta[i];
      gu_mean += delta[i] * u;
    }
    g_mean /= static_cast<double>(n);
    gu_mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      double u = cache.ln_centered[i] * rstd;
      delta[i] = rstd * (delta[i] - g_mean - u * gu_mean);
    }
  }

  for (int l = num_layers - 1; l >= 0; --l) {
    const bool is_output = l == num_layers - 1;
    const std::vector<double>& in_act =
        l == 0 ? cache.input : cache.post[static_cast<std::size_t>(l - 1)];
    const int in = static_cast<int>(in_act.size());
    const int out = static_cast<int>(delta.size());

    if (!is_output) {
      const std::vector<double>& pre = cache.pre[static_cast<std::size_t>(l)];
      for (int r = 0; r < out; ++r) {
        delta[static_cast<std::size_t>(r)] *=
            activation_grad(spec_.activation, pre[static_cast<std::size_t>(r)]);
      }
    }

    auto w = params.seg(weight_ids_[static_cast<std::size_t>(l)]);
    if (grad != nullptr) {
      auto gw = grad->seg(weight_ids_[static_cast<std::size_t>(l)]);
      auto gb = grad->seg(bias_ids_[static_cast<std::size_t>(l)]);
      for (int r = 0; r < out; ++r) {
        const double d = scale * delta[static_cast<std::size_t>(r)];
        double* grow = gw.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(in);
        for (int c = 0; c < in; ++c) grow[c] += d * in_act[static_cast<std::size_t>(c)];
        gb[static_cast<std::size_t>(r)] += d;
      }
    }

    if (l == 0) {
      if (!x_grad.empty()) {
        for (int r = 0; r < out; ++r) {
          const double d = scale * delta[static_cast<std::size_t>(r)];
          const double* row = w.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(in);
          for (int c = 0; c < in; ++c) x_grad[static_cast<std::size_t>(c)] += d * row[c];
        }
      }
    } else {
      std::vector<double> prev(static_cast<std::size_t>(in), 0.0);
      for (int r = 0; r < out; ++r) {
        const double d = delta[static_cast<std::size_t>(r)];
        const double* row = w.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(in);
        for (int c = 0; c < in; ++c) prev[static_cast<std::size_t>(c)] += d * row[c];
      }
      delta.swap(prev);
    }
  }
}

}  // namespace ccem::nn
