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

#ifndef COOPATTACK_SSD_H_
#define COOPATTACK_SSD_H_

// Sequential social dilemmas. A two-player Markov game is reduced, at a
// state s, to a 2x2 matrix game by evaluating a cooperative policy pi_C and a
// defecting policy pi_D against each other:
//
//   R(s) = V1[C,C](s)   P(s) = V1[D,D](s)   S(s) = V1[C,D](s)   T(s) = V1[D,C](s)
//
// and the quadruple is tested against the four social-dilemma inequalities.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coopattack/attacks.h"
#include "coopattack/rng.h"

namespace coopattack::ssd {

struct MgsdPayoffs {
  double reward = 0.0;      // R: mutual cooperation
  double punishment = 0.0;  // P: mutual defection
  double sucker = 0.0;      // S: cooperate against a defector
  double temptation = 0.0;  // T: defect against a cooperator
  std::optional<std::string> state_label;
};

enum class Condition {
  kRewardOverPunishment,   // R > P
  kRewardOverSucker,       // R > S
  kRewardOverAlternation,  // 2R > T + S
  kGreedOrFear,            // T > R or P > S
};

std::string ConditionName(Condition c);

struct DilemmaVerdict {
  bool is_dilemma = false;
  bool greed = false;  // T > R
  bool fear = false;   // P > S
  std::vector<Condition> failed_conditions;
};

// All comparisons are strict. Throws RejectedInput on non-finite payoffs.
DilemmaVerdict Classify(const MgsdPayoffs& p);

inline constexpr int kCooperate = 0;
inline constexpr int kDefect = 1;

struct Transition {
  int next_state = 0;
  double reward1 = 0.0;
  double reward2 = 0.0;
  bool terminal = false;
};

// Two-player simultaneous-move Markov game with integer states.
class MarkovGame {
 public:
  virtual ~MarkovGame() = default;
  virtual int InitialState() const = 0;
  virtual Transition Step(int state, int action1, int action2,
                          Rng& rng) const = 0;
};

// Action for `player` (0 or 1) at `state`.
using Policy = std::function<int(int state, int player, Rng& rng)>;

Policy AlwaysCooperate();
Policy AlwaysDefect();
Policy DefectWithProbability(double p);

// Repeated 2x2 stage game that never terminates on its own; the discount
// sets the effective horizon 1/(1 - gamma). State 0 is the start, state
// 1 + 2*a1 + a2 remembers the last joint action.
class IteratedMatrixGame : public MarkovGame {
 public:
  // payoff[k][a1][a2] is player k's stage payoff.
  explicit IteratedMatrixGame(std::array<std::array<std::array<double, 2>, 2>, 2> payoff);
  // Symmetric game from player 1's payoffs: R (C,C), S (C,D), T (D,C), P (D,D).
  static IteratedMatrixGame Symmetric(double r, double s, double t, double p);

  int InitialState() const override { return 0; }
  Transition Step(int state, int action1, int action2, Rng& rng) const override;
  double payoff(int player, int a1, int a2) const { return payoff_[player][a1][a2]; }

 private:
  std::array<std::array<std::array<double, 2>, 2>, 2> payoff_;
};

struct ValueEstimate {
  double value1 = 0.0;
  double value2 = 0.0;
  double stderr1 = 0.0;  // standard error of value1
  double stderr2 = 0.0;
  double stderr_diff = 0.0;  // of the per-episode difference value1 - value2
  int episodes = 0;
};

// Rollouts stop at a terminal transition or once gamma^t falls below this.
inline constexpr double kDiscountCutoff = 1e-15;

// Monte-Carlo estimate of each player's discounted return from `start`.
// Episodes run in parallel, each on its own stream derived from one draw of
// `rng`, so the result does not depend on the thread count.
ValueEstimate EstimateValue(const MarkovGame& game, const Policy& policy1,
                            const Policy& policy2, int start, int episodes,
                            double gamma, Rng& rng);
ValueEstimate EstimateValueSerial(const MarkovGame& game,
                                  const Policy& policy1, const Policy& policy2,
                                  int start, int episodes, double gamma,
                                  Rng& rng);

// Empirical R, P, S, T at `start`. Each of the role-swap identities
// V1[X,Y] = V2[Y,X] must hold within 3 standard errors of the difference
// (paired for X == Y, pooled otherwise) plus a 1e-9 relative slack for exact
// ties, otherwise AsymmetricGame is thrown.
MgsdPayoffs InduceMgsd(const MarkovGame& game, const Policy& cooperative,
                       const Policy& defecting, int start, int episodes,
                       double gamma, Rng& rng);

enum class PolicyClass { kCooperative, kDefecting, kUnclassified };

std::string PolicyClassName(PolicyClass c);

// alpha < alpha_c is cooperative, alpha > alpha_d is defecting.
struct SocialMetricConfig {
  std::function<double(std::span<const double>)> alpha;
  double alpha_c = 0.0;
  double alpha_d = 0.0;
};

PolicyClass ClassifyPolicy(const SocialMetricConfig& cfg,
                           std::span<const double> params);

// Attacker reward 1 when the perturbed victim classifies as defecting.
AttackerReward DefectionReward(SocialMetricConfig cfg);

// Social metric of the built-in victim: a one-parameter policy that defects
// with probability clamp(theta, 0, 1). alpha is its defection frequency over
// `episodes` rollouts of `horizon` steps against `partner`, drawn with common
// random numbers from `seed` so that alpha is a deterministic function.
std::function<double(std::span<const double>)> DefectionFrequencyMetric(
    const MarkovGame& game, Policy partner, int episodes, int horizon,
    std::uint64_t seed);

}  // namespace coopattack::ssd

#endif  // COOPATTACK_SSD_H_
