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

#ifndef COOPATTACK_ATTACKS_H_
#define COOPATTACK_ATTACKS_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coopattack/rng.h"
#include "coopattack/valuenet.h"

namespace coopattack {

enum class AttackKind { kNone, kFgsm };

std::string AttackKindName(AttackKind kind);
AttackKind ParseAttackKind(const std::string& name);

// kValue steps against the gradient of V itself, pushing the assessed value
// down. kLoss is the classic form: step along the gradient of the squared
// error (V - loss_target)^2.
enum class FgsmObjective { kValue, kLoss };

// kPosteriorsOnly leaves the one-hot utterance blocks untouched.
enum class FgsmScope { kFull, kPosteriorsOnly };

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
  double epsilon = 0.0;
  FgsmObjective objective = FgsmObjective::kValue;
  double loss_target = 1.0;
  FgsmScope scope = FgsmScope::kFull;

  // kind == kNone means no perturbation whatever epsilon says.
  bool active() const { return kind == AttackKind::kFgsm && epsilon > 0.0; }
};

struct FgsmOptions {
  double epsilon = 0.0;
  FgsmObjective objective = FgsmObjective::kValue;
  double loss_target = 1.0;
  // Number of leading coordinates to perturb; -1 perturbs all of them.
  int perturb_dims = -1;
  // Clamp range applied after the step; nullopt leaves values unbounded.
  std::optional<std::pair<double, double>> bounds = std::pair{0.0, 1.0};
};

// sign(0) == 0.
inline double Sign(double v) { return (v > 0.0) - (v < 0.0); }

// Single fast-gradient-sign step on x, then clamp to `bounds`.
std::vector<double> FgsmPerturb(const ValueNet& net, std::span<const double> x,
                                const FgsmOptions& options);

// clamp(x - eps * sign(dV/dx), 0, 1): the default attack on belief inputs.
std::vector<double> FgsmBelief(const ValueNet& net, std::span<const double> x,
                               double epsilon);

// FgsmOptions for a belief input of the given layout under `spec`.
FgsmOptions BeliefFgsmOptions(const AttackSpec& spec, int num_items);

struct PolicyPerturbation {
  double delta_bound = 0.0;
  std::vector<double> perturbation;  // every entry in (-delta, delta)
  double score = 0.0;                // attacker reward of the returned sample
  double baseline_score = 0.0;       // attacker reward with no perturbation

  double max_norm() const;
};

// Attacker reward for a perturbed parameter vector: the fraction of
// evaluation episodes in which the victim fails to behave cooperatively.
using AttackerReward = std::function<double(std::span<const double>)>;

// Random search over (-delta, delta)^d for the perturbation that maximizes
// the attacker's reward. Returns the zero perturbation unless some sample
// strictly beats the unperturbed baseline; ties keep the earliest sample.
PolicyPerturbation AttackPolicyParams(const AttackerReward& attacker_reward,
                                      std::span<const double> base_params,
                                      double delta, int trials, Rng& rng);

}  // namespace coopattack

#endif  // COOPATTACK_ATTACKS_H_
