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

#ifndef COOPATTACK_HARNESS_H_
#define COOPATTACK_HARNESS_H_

// Experiment orchestration: seed x epsilon sweeps of CAPI training under the
// FGSM belief attack, CSV persistence and per-(epsilon, episode) summaries.
//
// Raw CSV:     seed,epsilon,episode,eval_return,attack_kind
// Summary CSV: epsilon,episode,n,mean_return,ci95_low,ci95_high,
//              optimal_frequency,optimal_ci95_low,optimal_ci95_high,halfway
//
// Reals are written with 17 significant digits so that parsing a raw file
// reproduces the in-memory values exactly.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "coopattack/attacks.h"
#include "coopattack/capi.h"
#include "coopattack/tradecomm.h"

namespace coopattack::harness {

// A run "reached the optimal policy" when its return exceeds this.
inline constexpr double kOptimalThreshold = 0.99;

struct SweepConfig {
  GameConfig game;
  CapiConfig capi;
  // Kind, objective and scope used for every epsilon > 0; epsilon = 0 is the
  // unattacked group.
  AttackSpec attack{AttackKind::kFgsm, 0.0};
  std::vector<double> epsilons = {0.0, 0.3, 0.5, 0.7};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string output_path;  // directory receiving raw.csv and summary.csv
  int jobs = 1;
  // Optimal frequency over all evaluations up to each episode instead of the
  // per-episode fraction of seeds.
  bool cumulative_optimal = false;

  void Validate() const;
};

struct RawRow {
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  int episode = 0;
  double eval_return = 0.0;
  AttackKind attack_kind = AttackKind::kNone;

  friend bool operator==(const RawRow&, const RawRow&) = default;
};

struct SummaryRow {
  double epsilon = 0.0;
  int episode = 0;
  int n = 0;
  double mean_return = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  double optimal_frequency = 0.0;
  double optimal_ci95_low = 0.0;
  double optimal_ci95_high = 0.0;
  bool halfway = false;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct SweepResult {
  std::vector<RawRow> raw;
  std::vector<SummaryRow> summary;
};

// Attack applied to the cell with this epsilon.
AttackSpec AttackFor(const SweepConfig& cfg, double epsilon);

// One training run. Its RNG is seeded from (seed, epsilon_index).
std::vector<RawRow> RunCell(const SweepConfig& cfg, std::uint64_t seed,
                            int epsilon_index);

// Runs every (epsilon, seed) cell, up to cfg.jobs at a time. Rows are
// ordered by epsilon, then seed, then episode whatever the job count. When
// output_path is set both files are opened before any training starts.
SweepResult RunSweep(const SweepConfig& cfg);

std::string FormatReal(double v);

void WriteRawCsv(std::ostream& out, const std::vector<RawRow>& rows);
// Throws ParseError naming the 1-based line of the first malformed row.
std::vector<RawRow> ReadRawCsv(std::istream& in);

// Groups by (epsilon, episode) in ascending order. The halfway row of each
// epsilon is the first episode >= max_episode / 2.
std::vector<SummaryRow> Summarize(const std::vector<RawRow>& raw,
                                  bool cumulative_optimal = false);

void WriteSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& rows);

// Flat `key = value` file; '#' starts a comment.
std::map<std::string, std::string> ReadFlatConfig(const std::string& path);
std::map<std::string, std::string> ParseFlatConfig(std::istream& in);

// Stage game and induced MGSD for a symmetric iterated 2x2 game described by
// payoff_cc, payoff_cd, payoff_dc, payoff_dd, gamma and optionally episodes,
// seed, cooperative_defect_prob, defecting_defect_prob. Writes CSV.
void RunSsd(const std::map<std::string, std::string>& config,
            std::ostream& out);

struct MeanfieldDemoOptions {
  int agents = 100;
  int dim = 4;
  double epsilon = 0.1;
  std::vector<double> lambdas = {0.0, 0.1, 0.25, 0.5, 0.75, 1.0};
  std::uint64_t seed = 1;
};

// CSV `series,parameter,value`: mean-shift norm against n for the
// coordinated-bias and FGSM-subset attacks, then entropy and KL to uniform
// of a peaked action distribution against lambda.
void RunMeanfieldDemo(const MeanfieldDemoOptions& options, std::ostream& out);

}  // namespace coopattack::harness

#endif  // COOPATTACK_HARNESS_H_
