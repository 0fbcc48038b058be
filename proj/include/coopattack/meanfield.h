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

#ifndef COOPATTACK_MEANFIELD_H_
#define COOPATTACK_MEANFIELD_H_

// Mean-field reductions and attacks on them. With N agents each agent learns
// from its own observation and the population mean (or, for discrete
// actions, the empirical action distribution). A perturbation of size eps on
// n of the N agents moves the mean by (n/N) * eps, so many individually small
// perturbations add up; and mixing the action distribution toward uniform
// erodes the predictability cooperation relies on.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coopattack/valuenet.h"

namespace coopattack::meanfield {

// N observations of dimension d, row-major.
class ObservationBatch {
 public:
  ObservationBatch(int num_agents, int dim, std::vector<double> data);
  static ObservationBatch FromRows(const std::vector<std::vector<double>>& rows);

  int num_agents() const { return num_agents_; }
  int dim() const { return dim_; }
  std::span<const double> row(int agent) const;
  std::span<double> mutable_row(int agent);
  std::span<const double> data() const { return data_; }

 private:
  int num_agents_;
  int dim_;
  std::vector<double> data_;
};

// (1/N) sum_j o_j. Parallel over coordinates.
std::vector<double> MeanObservation(const ObservationBatch& batch);
// Plain row-by-row accumulation; reference for MeanObservation.
std::vector<double> MeanObservationSerial(const ObservationBatch& batch);

// Shifts the first n observations by eps * direction (|direction| = 1), so
// the mean moves by exactly (n/N) * eps * direction. Requires 1 <= n <= N.
ObservationBatch CoordinatedBiasAttack(const ObservationBatch& batch, int n,
                                       double epsilon,
                                       std::span<const double> direction);

// Replaces the first n observations by their sign-gradient step against
// net's value. n = 0 is a no-op. Unbounded unless `bounds` is set.
ObservationBatch FgsmSubsetAttack(
    const ObservationBatch& batch, int n, double epsilon, const ValueNet& net,
    std::optional<std::pair<double, double>> bounds = std::nullopt);

// ||mean(attacked) - mean(clean)||_2.
double MeanShiftNorm(const ObservationBatch& clean,
                     const ObservationBatch& attacked);

// Empirical distribution over num_actions of the given action indices.
std::vector<double> EmpiricalActionDistribution(std::span<const int> actions,
                                                int num_actions);

// (1 - lambda) * dist + lambda * uniform.
std::vector<double> Uniformize(std::span<const double> dist, double lambda);

// Natural-log entropy; 0 log 0 = 0.
double Entropy(std::span<const double> dist);

// KL(dist || uniform) = log A - H(dist).
double KlToUniform(std::span<const double> dist);

void ValidateDistribution(std::span<const double> dist);

}  // namespace coopattack::meanfield

#endif  // COOPATTACK_MEANFIELD_H_
