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

#include "coopattack/meanfield.h"

#include <cmath>
#include <string>

#include "coopattack/attacks.h"
#include "coopattack/errors.h"
#include "coopattack/kernels.h"
#include "coopattack/pubbelief.h"

namespace coopattack::meanfield {

ObservationBatch::ObservationBatch(int num_agents, int dim,
                                   std::vector<double> data)
    : num_agents_(num_agents), dim_(dim), data_(std::move(data)) {
  if (num_agents < 1) throw RejectedInput("batch needs at least one agent");
  if (dim < 1) throw RejectedInput("observations need dimension >= 1");
  if (data_.size() != static_cast<size_t>(num_agents) * dim) {
    throw RejectedInput("batch data does not match num_agents x dim");
  }
}

ObservationBatch ObservationBatch::FromRows(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw RejectedInput("empty observation batch");
  const size_t d = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * d);
  for (const std::vector<double>& r : rows) {
    if (r.size() != d) throw RejectedInput("observations differ in dimension");
    data.insert(data.end(), r.begin(), r.end());
  }
  return ObservationBatch(static_cast<int>(rows.size()), static_cast<int>(d),
                          std::move(data));
}

std::span<const double> ObservationBatch::row(int agent) const {
  return std::span<const double>(data_).subspan(
      static_cast<size_t>(agent) * dim_, dim_);
}

std::span<double> ObservationBatch::mutable_row(int agent) {
  return std::span<double>(data_).subspan(static_cast<size_t>(agent) * dim_,
                                          dim_);
}

std::vector<double> MeanObservation(const ObservationBatch& batch) {
  return kernels::ColumnMeans(batch.data(), batch.num_agents(), batch.dim());
}

std::vector<double> MeanObservationSerial(const ObservationBatch& batch) {
  return kernels::ColumnMeansSerial(batch.data(), batch.num_agents(),
                                    batch.dim());
}

ObservationBatch CoordinatedBiasAttack(const ObservationBatch& batch, int n,
                                       double epsilon,
                                       std::span<const double> direction) {
  if (n < 1 || n > batch.num_agents()) {
    throw RejectedInput("attacked subset size must be in [1, N]");
  }
  if (static_cast<int>(direction.size()) != batch.dim()) {
    throw RejectedInput("direction dimension mismatch");
  }
  double norm2 = 0.0;
  for (double v : direction) norm2 += v * v;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
    throw RejectedInput("direction must be a unit vector");
  }
  ObservationBatch out = batch;
  for (int a = 0; a < n; ++a) {
    std::span<double> r = out.mutable_row(a);
    for (int k = 0; k < batch.dim(); ++k) r[k] += epsilon * direction[k];
  }
  return out;
}

ObservationBatch FgsmSubsetAttack(
    const ObservationBatch& batch, int n, double epsilon, const ValueNet& net,
    std::optional<std::pair<double, double>> bounds) {
  if (n < 0 || n > batch.num_agents()) {
    throw RejectedInput("attacked subset size must be in [0, N]");
  }
  if (net.input_dim() != batch.dim()) {
    throw RejectedInput("network input does not match observation dimension");
  }
  FgsmOptions options;
  options.epsilon = epsilon;
  options.bounds = bounds;
  ObservationBatch out = batch;
  // Agents are independent; rows are written by exactly one iteration.
  std::exception_ptr error;
#pragma omp parallel for schedule(static) if (n >= kernels::kMinParallelItems)
  for (int a = 0; a < n; ++a) {
    try {
      const std::vector<double> step = FgsmPerturb(net, batch.row(a), options);
      std::span<double> r = out.mutable_row(a);
      for (int k = 0; k < batch.dim(); ++k) r[k] = step[k];
    } catch (...) {
#pragma omp critical(coopattack_meanfield_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

double MeanShiftNorm(const ObservationBatch& clean,
                     const ObservationBatch& attacked) {
  if (clean.num_agents() != attacked.num_agents() ||
      clean.dim() != attacked.dim()) {
    throw RejectedInput("batches differ in shape");
  }
  const std::vector<double> a = MeanObservation(clean);
  const std::vector<double> b = MeanObservation(attacked);
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += (b[k] - a[k]) * (b[k] - a[k]);
  return std::sqrt(s);
}

std::vector<double> EmpiricalActionDistribution(std::span<const int> actions,
                                                int num_actions) {
  if (actions.empty()) throw RejectedInput("no actions");
  if (num_actions < 1) throw RejectedInput("num_actions must be >= 1");
  std::vector<double> dist(num_actions, 0.0);
  for (int a : actions) {
    if (a < 0 || a >= num_actions) throw RejectedInput("action out of range");
    dist[a] += 1.0;
  }
  for (double& p : dist) p /= static_cast<double>(actions.size());
  return dist;
}

void ValidateDistribution(std::span<const double> dist) {
  if (dist.empty()) throw RejectedInput("empty distribution");
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0 && p <= 1.0)) throw RejectedInput("probability outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw RejectedInput("distribution does not sum to 1");
  }
}

std::vector<double> Uniformize(std::span<const double> dist, double lambda) {
  ValidateDistribution(dist);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw RejectedInput("lambda must lie in [0,1]");
  }
  const double u = 1.0 / static_cast<double>(dist.size());
  std::vector<double> out(dist.size());
  for (size_t a = 0; a < dist.size(); ++a) {
    out[a] = (1.0 - lambda) * dist[a] + lambda * u;
  }
  return out;
}

double Entropy(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double KlToUniform(std::span<const double> dist) {
  return std::log(static_cast<double>(dist.size())) - Entropy(dist);
}

}  // namespace coopattack::meanfield
