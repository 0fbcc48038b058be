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

#ifndef COOPATTACK_CAPI_H_
#define COOPATTACK_CAPI_H_

// Cooperative approximate policy iteration on Trade Comm, at desk scale.
//
// A coordinator acts on the public belief. At each of the three decision
// points (player 1 utterance, player 2 utterance, joint trade) it draws a
// candidate set of prescriptions, scores each one, and picks the best
// (epsilon-greedy while training). Utterance prescriptions are scored by the
// expected value network output over the successor beliefs they induce;
// trade prescriptions by their exact expected reward. By default the value
// network is regressed on the best candidate score at each visited belief.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coopattack/attacks.h"
#include "coopattack/pubbelief.h"
#include "coopattack/rng.h"
#include "coopattack/tradecomm.h"
#include "coopattack/valuenet.h"

namespace coopattack {

inline constexpr std::uint64_t kDefaultEvalSeed = 20211;

// Regression target for each visited decision point: the assessed value of
// the prescription actually taken (kAssessed), the best assessed value among
// the candidates whatever exploration picked (kGreedy), or the episode's
// reward (kMonteCarlo).
enum class ValueTarget { kAssessed, kGreedy, kMonteCarlo };

enum class Optimizer { kSgd, kAdam };

struct CapiConfig {
  int episodes = 2000;
  int candidates = 64;  // random candidates; the identity one is added on top
  double explore_start = 0.5;
  double explore_end = 0.05;
  double explore_decay_fraction = 0.5;  // of `episodes`
  double lr = 1e-3;
  // Regression samples kept for replay, and extra optimizer steps drawn from
  // them after each episode. 0 replays means plain per-episode regression.
  int replay_capacity = 6000;
  int replay_updates = 64;
  ValueTarget targets = ValueTarget::kGreedy;
  Optimizer optimizer = Optimizer::kAdam;
  Activation activation = Activation::kSilu;
  int eval_every = 20;
  std::uint64_t seed = 0;
  std::uint64_t eval_seed = kDefaultEvalSeed;
  std::vector<int> hidden = {64, 64};
  // Evaluate with the attacker active too (default: clean evaluation).
  bool perturb_eval = false;

  void Validate() const;
  // Exploration rate for 0-based episode index `episode`.
  double ExploreAt(int episode) const;
};

struct TrainRecord {
  int episode = 0;
  double eval_return = 0.0;
  AttackKind attack_kind = AttackKind::kNone;
  double epsilon = 0.0;
};

// What every player knows: phase, belief and utterances so far.
struct PublicState {
  Phase phase = Phase::kUtterance1;
  Belief belief;
  std::optional<int> utt1;
  std::optional<int> utt2;

  static PublicState Initial(const GameConfig& game);
  std::vector<double> Encode(const GameConfig& game) const;
};

// The value network as the coordinator sees it: optionally behind an FGSM
// attacker that perturbs every belief input before it reaches the network.
class ValueView {
 public:
  ValueView(const ValueNet& net, const GameConfig& game,
            const AttackSpec& attack = {});

  // The representation the network is fed for clean input x.
  std::vector<double> Represent(std::span<const double> x) const;
  double operator()(std::span<const double> x) const;
  const ValueNet& net() const { return *net_; }

 private:
  const ValueNet* net_;
  FgsmOptions fgsm_;
  bool active_;
};

UtterancePrescription IdentityUtterancePrescription(const GameConfig& game);
// Player k with item i requests (i, argmax of the other player's posterior).
JointTradePrescription BeliefArgmaxTrade(const GameConfig& game,
                                         const Belief& b);

// K uniformly random item -> utterance maps, then the identity map.
std::vector<UtterancePrescription> UtteranceCandidates(const GameConfig& game,
                                                       int k, Rng& rng);
// K random joint trade prescriptions (give = own item, want uniform), then
// BeliefArgmaxTrade.
std::vector<JointTradePrescription> TradeCandidates(const GameConfig& game,
                                                    const Belief& b, int k,
                                                    Rng& rng);

// Sum_i b_actor(i) * V(encode(update(b, presc, presc[i]))); immediate reward
// of an utterance is zero.
double AssessUtterancePrescription(const ValueView& value,
                                   const GameConfig& game,
                                   const PublicState& state,
                                   const UtterancePrescription& presc);

double AssessPrescription(const ValueNet& net, const GameConfig& game,
                          const PublicState& state,
                          const UtterancePrescription& presc);

// Exact expected reward of a joint trade prescription under b.
double AssessTradePrescription(const Belief& b,
                               const JointTradePrescription& presc);

// Scores for a whole candidate set. Distinct successor beliefs are queried
// once each, in parallel; ParallelAssess and SerialAssess agree exactly.
std::vector<double> ParallelAssess(
    const ValueView& value, const GameConfig& game, const PublicState& state,
    std::span<const UtterancePrescription> candidates);
std::vector<double> SerialAssess(
    const ValueView& value, const GameConfig& game, const PublicState& state,
    std::span<const UtterancePrescription> candidates);

// First maximal index; with probability `explore` a uniform index instead.
int SelectIndex(std::span<const double> values, double explore, Rng* rng);

// Chooses prescriptions at public states.
class Coordinator {
 public:
  virtual ~Coordinator() = default;
  virtual UtterancePrescription ChooseUtterance(const PublicState& state) = 0;
  virtual JointTradePrescription ChooseTrade(const PublicState& state) = 0;
};

// Identity signaling followed by the belief-argmax trade.
class IdentityCoordinator : public Coordinator {
 public:
  explicit IdentityCoordinator(GameConfig game) : game_(game) {}
  UtterancePrescription ChooseUtterance(const PublicState& state) override;
  JointTradePrescription ChooseTrade(const PublicState& state) override;

 private:
  GameConfig game_;
};

// Greedy CAPI policy. Candidate sets are drawn from a stream seeded by
// (eval_seed, phase, utt1, utt2), so choices depend only on the public state.
class GreedyCoordinator : public Coordinator {
 public:
  GreedyCoordinator(const ValueNet& net, GameConfig game, int k,
                    std::uint64_t eval_seed, const AttackSpec& attack = {});
  UtterancePrescription ChooseUtterance(const PublicState& state) override;
  JointTradePrescription ChooseTrade(const PublicState& state) override;

 private:
  Rng StreamFor(const PublicState& state) const;

  ValueView value_;
  GameConfig game_;
  int k_;
  std::uint64_t eval_seed_;
};

// Exact expected return of a coordinator, by playing every deal.
double ExpectedReturn(const GameConfig& game, Coordinator& coordinator);

// Exact expected return of the greedy policy induced by `net`.
double Evaluate(const ValueNet& net, const GameConfig& game, int k,
                std::uint64_t eval_seed = kDefaultEvalSeed,
                const AttackSpec& attack = {});

// Runs cfg.episodes training episodes and an evaluation every eval_every
// episodes. With an active FGSM attack the network only ever sees perturbed
// belief inputs during training, both when scoring candidates and as
// regression inputs. If `trained` is non-null it receives the final network.
std::vector<TrainRecord> Train(const CapiConfig& cfg, const GameConfig& game,
                               const AttackSpec& attack,
                               ValueNet* trained = nullptr);

}  // namespace coopattack

#endif  // COOPATTACK_CAPI_H_
