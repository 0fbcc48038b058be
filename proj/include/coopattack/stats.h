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

#ifndef COOPATTACK_STATS_H_
#define COOPATTACK_STATS_H_

#include <span>

namespace coopattack {

inline constexpr double kZ95 = 1.96;

struct MeanStats {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;           // sample standard deviation; 0 when n == 1
  double stderr_mean = 0.0;  // sd / sqrt(n)

  // Normal-approximation 95% interval; degenerates to the mean at n == 1.
  double ci95_low() const { return mean - kZ95 * stderr_mean; }
  double ci95_high() const { return mean + kZ95 * stderr_mean; }
  double ci95_half_width() const { return kZ95 * stderr_mean; }
};

// Two-pass mean and variance, summed in input order.
MeanStats ComputeMeanStats(std::span<const double> values);

}  // namespace coopattack

#endif  // COOPATTACK_STATS_H_
