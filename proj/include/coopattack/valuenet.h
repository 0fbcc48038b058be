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

#ifndef COOPATTACK_VALUENET_H_
#define COOPATTACK_VALUENET_H_

#include <span>
#include <string>
#include <vector>

#include "coopattack/rng.h"

namespace coopattack {

// Hidden-unit nonlinearity. All three are smooth with bounded slope.
enum class Activation { kTanh, kSoftplus, kSilu };

std::string ActivationName(Activation activation);
Activation ParseActivation(const std::string& name);
double Activate(Activation activation, double z);
double ActivateDerivative(Activation activation, double z);

// Fully connected layer; weights are row-major with shape (out, in).
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

// Exact gradients of a scalar loss. param_grads mirrors the network layers.
struct GradientReport {
  std::vector<DenseLayer> param_grads;
  std::vector<double> input_grad;
  double output = 0.0;  // V(x) from the forward half of the pass
};

// Small feedforward regressor V(x) -> scalar with smooth hidden units and a
// linear output unit. A layer_dims of {d, 1} is a single affine map.
//
// Besides the usual parameter gradients, Backward returns the gradient with
// respect to the input, which is what the white-box sign attacks consume.
class ValueNet {
 public:
  // Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  ValueNet(std::vector<int> layer_dims, Rng& rng,
           Activation activation = Activation::kSilu);

  static ValueNet Zeros(std::vector<int> layer_dims,
                        Activation activation = Activation::kSilu);
  static ValueNet FromLayers(std::vector<DenseLayer> layers,
                             Activation activation = Activation::kSilu);

  int input_dim() const { return layer_dims_.front(); }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  Activation activation() const { return activation_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  int num_params() const;

  double Forward(std::span<const double> x) const;

  // Gradients of a loss L whose derivative w.r.t. the output is loss_grad.
  GradientReport Backward(std::span<const double> x, double loss_grad) const;

  // In-place SGD: theta -= lr * grad. Throws NumericError if any parameter
  // becomes non-finite.
  void ApplySgd(const GradientReport& grads, double lr);

  bool AllFinite() const;

 private:
  ValueNet() = default;
  void CheckInput(std::span<const double> x) const;

  std::vector<int> layer_dims_;
  std::vector<DenseLayer> layers_;
  Activation activation_ = Activation::kSilu;
};

// Value-returning form of ValueNet::ApplySgd.
ValueNet SgdStep(ValueNet net, const GradientReport& grads, double lr);

// Adam moment estimates for one network. Step() updates the parameters in
// place; SGD remains available through ValueNet::ApplySgd.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(const ValueNet& net, double lr = 1e-3,
                         double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);
  void Step(ValueNet& net, const GradientReport& grads);
  int steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
};

// Hidden sizes default to two layers of 64.
std::vector<int> MakeLayerDims(int input_dim,
                               const std::vector<int>& hidden = {64, 64});

}  // namespace coopattack

#endif  // COOPATTACK_VALUENET_H_
