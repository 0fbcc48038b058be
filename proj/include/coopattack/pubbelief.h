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

#ifndef COOPATTACK_PUBBELIEF_H_
#define COOPATTACK_PUBBELIEF_H_

// Public belief over the private items of Trade Comm.
//
// The public belief is the posterior over both dealt items given everything
// said so far. It is kept as two marginals rather than a joint table over
// (item1, item2). This loses nothing:
//
//   * the prior is a product, since items are dealt independently;
//   * a prescription for player k reads only item_k, so the likelihood of an
//     observed utterance is a function of item_k alone;
//   * a product prior times a likelihood that depends on one factor is again
//     a product, so by induction every posterior factorizes.
//
// The update is Bayes' rule with the acting player's prescription as the
// likelihood. Prescriptions are deterministic, so the likelihood is an
// indicator and the posterior is the prior restricted to the items that
// would have produced the observed action, renormalized.

#include <optional>
#include <span>
#include <vector>

#include "coopattack/tradecomm.h"

namespace coopattack {

inline constexpr double kSimplexTolerance = 1e-9;

struct Belief {
  std::vector<double> p1;  // posterior over item1
  std::vector<double> p2;  // posterior over item2

  const std::vector<double>& of(Player p) const {
    return p == Player::kOne ? p1 : p2;
  }
  std::vector<double>& of(Player p) { return p == Player::kOne ? p1 : p2; }

  // Throws RejectedInput unless both vectors lie on the simplex.
  void Validate() const;

  friend bool operator==(const Belief&, const Belief&) = default;
};

// Item -> utterance for the acting player.
struct UtterancePrescription {
  std::vector<int> utterance;
};

// Item -> trade request for one player.
struct TradePrescription {
  std::vector<TradeRequest> request;
};

struct JointTradePrescription {
  TradePrescription player1;
  TradePrescription player2;
};

void ValidatePrescription(const GameConfig& cfg,
                          const UtterancePrescription& presc);
void ValidatePrescription(const GameConfig& cfg,
                          const TradePrescription& presc);

Belief InitialBelief(const GameConfig& cfg);

// Posterior after observing `observed` from `actor` acting under `presc`.
// Throws ZeroProbabilityEvent if no item with prior mass maps to `observed`.
Belief UpdateBelief(const Belief& b, const UtterancePrescription& presc,
                    int observed, Player actor);

// Same rule with an arbitrary likelihood P(action | item) for the actor.
Belief UpdateBeliefWithLikelihood(const Belief& b,
                                  std::span<const double> likelihood,
                                  Player actor);

// Length of the value-network input: 2 * num_items + 2 * num_utterances.
int EncodedSize(const GameConfig& cfg);

// [p1 ++ p2 ++ onehot(utt1) ++ onehot(utt2)], absent utterances all-zero.
std::vector<double> Encode(const GameConfig& cfg, const Belief& b,
                           std::optional<int> utt1, std::optional<int> utt2);

// Posterior blocks of an encoded input.
Belief DecodeBelief(const GameConfig& cfg, std::span<const double> x);

}  // namespace coopattack

#endif  // COOPATTACK_PUBBELIEF_H_
