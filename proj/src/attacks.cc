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

#include "coopattack/attacks.h"

#include <algorithm>
#include <cmath>

#include "coopattack/errors.h"

namespace coopattack {

std::string AttackKindName(AttackKind kind) {
  return kind == AttackKind::kFgsm ? "fgsm" : "none";
}

AttackKind ParseAttackKind(const std::string& name) {
  if (name == "none") return AttackKind::kNone;
  if (name == "fgsm") return AttackKind::kFgsm;
  throw RejectedInput("unknown attack kind '" + name + "'");
}

std::vector<double> FgsmPerturb(const ValueNet& net, std::span<const double> x,
                                const FgsmOptions& options) {
  if (!(options.epsilon >= 0.0)) throw RejectedInput("epsilon must be >= 0");
  std::vector<double> out(x.begin(), x.end());
  if (options.epsilon == 0.0) {
    if (static_cast<int>(x.size()) != net.input_dim()) {
      throw RejectedInput("input does not match network dimension");
    }
    return out;
  }
  double direction = -1.0;
  if (options.objective == FgsmObjective::kLoss) {
    // d/dx (V - t)^2 = 2 (V - t) dV/dx.
    direction = Sign(net.Forward(x) - options.loss_target);
  }
  const GradientReport grads = net.Backward(x, 1.0);
  const int dims = options.perturb_dims < 0
                       ? static_cast<int>(out.size())
                       : std::min<int>(options.perturb_dims, out.size());
  for (int i = 0; i < dims; ++i) {
    out[i] += direction * options.epsilon * Sign(grads.input_grad[i]);
    if (options.bounds) {
      out[i] = std::clamp(out[i], options.bounds->first, options.bounds->second);
    }
  }
  return out;
}

std::vector<double> FgsmBelief(const ValueNet& net, std::span<const double> x,
                               double epsilon) {
  FgsmOptions options;
  options.epsilon = epsilon;
  return FgsmPerturb(net, x, options);
}

FgsmOptions BeliefFgsmOptions(const AttackSpec& spec, int num_items) {
  FgsmOptions options;
  options.epsilon = spec.active() ? spec.epsilon : 0.0;
  options.objective = spec.objective;
  options.loss_target = spec.loss_target;
  options.perturb_dims = spec.scope == FgsmScope::kFull ? -1 : 2 * num_items;
  return options;
}

double PolicyPerturbation::max_norm() const {
  double m = 0.0;
  for (double v : perturbation) m = std::max(m, std::abs(v));
  return m;
}

PolicyPerturbation AttackPolicyParams(const AttackerReward& attacker_reward,
                                      std::span<const double> base_params,
                                      double delta, int trials, Rng& rng) {
  if (!(delta > 0.0)) throw RejectedInput("delta must be > 0");
  if (trials < 1) throw RejectedInput("trials must be >= 1");
  const size_t d = base_params.size();
  PolicyPerturbation best;
  best.delta_bound = delta;
  best.perturbation.assign(d, 0.0);
  best.baseline_score = attacker_reward(base_params);
  best.score = best.baseline_score;

  std::uniform_real_distribution<double> uniform(-delta, delta);
  std::vector<double> sample(d);
  std::vector<double> params(d);
  for (int t = 0; t < trials; ++t) {
    for (size_t k = 0; k < d; ++k) {
      // The distribution is half-open [-delta, delta); drop the endpoint.
      do {
        sample[k] = uniform(rng);
      } while (sample[k] <= -delta || sample[k] >= delta);
      params[k] = base_params[k] + sample[k];
    }
    const double score = attacker_reward(params);
    if (score > best.score) {
      best.score = score;
      best.perturbation = sample;
    }
  }
  return best;
}

}  // namespace coopattack
