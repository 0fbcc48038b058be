// Copyright 2026 The coopattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coopattack/valuenet.h"

#include <cmath>
#include <string>
#include <utility>

#include "coopattack/errors.h"

namespace coopattack {
namespace {

void ValidateDims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw RejectedInput("layer_dims needs at least 2 entries");
  for (int d : dims) {
    if (d <= 0) throw RejectedInput("layer_dims entries must be positive");
  }
  if (dims.back() != 1) throw RejectedInput("output dimension must be 1");
}

std::vector<DenseLayer> ShapedLayers(const std::vector<int>& dims) {
  std::vector<DenseLayer> layers;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.weights.assign(static_cast<size_t>(layer.in) * layer.out, 0.0);
    layer.bias.assign(layer.out, 0.0);
    layers.push_back(std::move(layer));
  }
  return layers;
}

}  // namespace

std::string ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kTanh: return "tanh";
    case Activation::kSoftplus: return "softplus";
    case Activation::kSilu: return "silu";
  }
  return "?";
}

Activation ParseActivation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "softplus") return Activation::kSoftplus;
  if (name == "silu") return Activation::kSilu;
  throw RejectedInput("unknown activation '" + name + "'");
}

double Activate(Activation activation, double z) {
  switch (activation) {
    case Activation::kTanh: return std::tanh(z);
    case Activation::kSoftplus:
      return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    case Activation::kSilu: return z / (1.0 + std::exp(-z));
  }
  return z;
}

double ActivateDerivative(Activation activation, double z) {
  switch (activation) {
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::kSoftplus: return 1.0 / (1.0 + std::exp(-z));
    case Activation::kSilu: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 + z * (1.0 - s));
    }
  }
  return 1.0;
}

ValueNet::ValueNet(std::vector<int> layer_dims, Rng& rng, Activation activation)
    : layer_dims_(std::move(layer_dims)), activation_(activation) {
  ValidateDims(layer_dims_);
  layers_ = ShapedLayers(layer_dims_);
  for (DenseLayer& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> init(-bound, bound);
    for (double& w : layer.weights) w = init(rng);
    for (double& b : layer.bias) b = init(rng);
  }
}

ValueNet ValueNet::Zeros(std::vector<int> layer_dims, Activation activation) {
  ValidateDims(layer_dims);
  ValueNet net;
  net.activation_ = activation;
  net.layers_ = ShapedLayers(layer_dims);
  net.layer_dims_ = std::move(layer_dims);
  return net;
}

ValueNet ValueNet::FromLayers(std::vector<DenseLayer> layers,
                              Activation activation) {
  if (layers.empty()) throw RejectedInput("network needs at least one layer");
  ValueNet net;
  net.activation_ = activation;
  net.layer_dims_.push_back(layers.front().in);
  for (size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    if (layer.in != net.layer_dims_.back() ||
        layer.weights.size() != static_cast<size_t>(layer.in) * layer.out ||
        layer.bias.size() != static_cast<size_t>(layer.out)) {
      throw RejectedInput("inconsistent layer shapes at layer " +
                          std::to_string(l));
    }
    net.layer_dims_.push_back(layer.out);
  }
  ValidateDims(net.layer_dims_);
  net.layers_ = std::move(layers);
  if (!net.AllFinite()) throw NumericError("non-finite parameter");
  return net;
}

int ValueNet::num_params() const {
  int n = 0;
  for (const DenseLayer& layer : layers_) {
    n += static_cast<int>(layer.weights.size() + layer.bias.size());
  }
  return n;
}

void ValueNet::CheckInput(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw RejectedInput("input has length " + std::to_string(x.size()) +
                        ", network expects " + std::to_string(input_dim()));
  }
}

double ValueNet::Forward(std::span<const double> x) const {
  CheckInput(x);
  std::vector<double> act(x.begin(), x.end());
  std::vector<double> next;
  for (size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    next.assign(layer.bias.begin(), layer.bias.end());
    for (int o = 0; o < layer.out; ++o) {
      const double* row = &layer.weights[static_cast<size_t>(o) * layer.in];
      double sum = 0.0;
      for (int i = 0; i < layer.in; ++i) sum += row[i] * act[i];
      next[o] += sum;
    }
    if (l + 1 < layers_.size()) {
      for (double& v : next) v = Activate(activation_, v);
    }
    act.swap(next);
  }
  return act[0];
}

GradientReport ValueNet::Backward(std::span<const double> x,
                                  double loss_grad) const {
  CheckInput(x);
  // Forward pass keeping pre-activations z[l] and outputs a[l] of each layer.
  std::vector<std::vector<double>> a;
  std::vector<std::vector<double>> z;
  a.emplace_back(x.begin(), x.end());
  for (size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    std::vector<double> pre(layer.bias.begin(), layer.bias.end());
    const std::vector<double>& in = a.back();
    for (int o = 0; o < layer.out; ++o) {
      const double* row = &layer.weights[static_cast<size_t>(o) * layer.in];
      double sum = 0.0;
      for (int i = 0; i < layer.in; ++i) sum += row[i] * in[i];
      pre[o] += sum;
    }
    std::vector<double> out = pre;
    if (l + 1 < layers_.size()) {
      for (double& v : out) v = Activate(activation_, v);
    }
    z.push_back(std::move(pre));
    a.push_back(std::move(out));
  }

  GradientReport report;
  report.output = a.back()[0];
  report.param_grads = ShapedLayers(layer_dims_);
  std::vector<double> delta = {loss_grad};  // dL/dz of the current layer
  for (size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    DenseLayer& grad = report.param_grads[l];
    const std::vector<double>& in = a[l];
    std::vector<double> upstream(layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double d = delta[o];
      grad.bias[o] = d;
      const size_t base = static_cast<size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) {
        grad.weights[base + i] = d * in[i];
        upstream[i] += d * layer.weights[base + i];
      }
    }
    if (l > 0) {
      const std::vector<double>& pre = z[l - 1];
      for (int i = 0; i < layer.in; ++i) {
        upstream[i] *= ActivateDerivative(activation_, pre[i]);
      }
    }
    delta.swap(upstream);
  }
  report.input_grad = std::move(delta);
  return report;
}

void ValueNet::ApplySgd(const GradientReport& grads, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw RejectedInput("learning rate must be finite and non-negative");
  }
  if (grads.param_grads.size() != layers_.size()) {
    throw RejectedInput("gradient layer count mismatch");
  }
  for (size_t l = 0; l < layers_.size(); ++l) {
    DenseLayer& layer = layers_[l];
    const DenseLayer& grad = grads.param_grads[l];
    if (grad.weights.size() != layer.weights.size() ||
        grad.bias.size() != layer.bias.size()) {
      throw RejectedInput("gradient shape mismatch at layer " +
                          std::to_string(l));
    }
    for (size_t k = 0; k < layer.weights.size(); ++k) {
      layer.weights[k] -= lr * grad.weights[k];
    }
    for (size_t k = 0; k < layer.bias.size(); ++k) {
      layer.bias[k] -= lr * grad.bias[k];
    }
  }
  if (!AllFinite()) throw NumericError("SGD step produced a non-finite parameter");
}

bool ValueNet::AllFinite() const {
  for (const DenseLayer& layer : layers_) {
    for (double w : layer.weights) {
      if (!std::isfinite(w)) return false;
    }
    for (double b : layer.bias) {
      if (!std::isfinite(b)) return false;
    }
  }
  return true;
}

ValueNet SgdStep(ValueNet net, const GradientReport& grads, double lr) {
  net.ApplySgd(grads, lr);
  return net;
}

AdamOptimizer::AdamOptimizer(const ValueNet& net, double lr, double beta1,
                             double beta2, double eps)
    : lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(ShapedLayers(net.layer_dims())),
      v_(ShapedLayers(net.layer_dims())) {}

void AdamOptimizer::Step(ValueNet& net, const GradientReport& grads) {
  std::vector<DenseLayer>& layers = net.mutable_layers();
  if (grads.param_grads.size() != layers.size() || m_.size() != layers.size()) {
    throw RejectedInput("gradient layer count mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                    std::vector<double>& m, std::vector<double>& v) {
    if (g.size() != theta.size()) throw RejectedInput("gradient shape mismatch");
    for (size_t k = 0; k < theta.size(); ++k) {
      m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
      theta[k] -= lr_ * (m[k] / c1) / (std::sqrt(v[k] / c2) + eps_);
    }
  };
  for (size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, grads.param_grads[l].weights, m_[l].weights,
           v_[l].weights);
    update(layers[l].bias, grads.param_grads[l].bias, m_[l].bias, v_[l].bias);
  }
  if (!net.AllFinite()) throw NumericError("Adam step produced a non-finite parameter");
}

std::vector<int> MakeLayerDims(int input_dim, const std::vector<int>& hidden) {
  std::vector<int> dims = {input_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  return dims;
}

}  // namespace coopattack
