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

#include "coopattack/capi.h"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "coopattack/errors.h"
#include "coopattack/kernels.h"

namespace coopattack {
namespace {

Player Actor(Phase phase) {
  if (phase == Phase::kUtterance1) return Player::kOne;
  if (phase == Phase::kUtterance2) return Player::kTwo;
  throw RejectedInput("no utterance decision in phase " + PhaseName(phase));
}

// Public state after `actor` utters `u` under `presc`.
PublicState Successor(const PublicState& state,
                      const UtterancePrescription& presc, int u) {
  const Player actor = Actor(state.phase);
  PublicState next = state;
  next.belief = UpdateBelief(state.belief, presc, u, actor);
  if (actor == Player::kOne) {
    next.utt1 = u;
    next.phase = Phase::kUtterance2;
  } else {
    next.utt2 = u;
    next.phase = Phase::kTrade;
  }
  return next;
}

int ArgmaxFirst(const std::vector<double>& p) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(p.size()); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

}  // namespace

void CapiConfig::Validate() const {
  if (episodes < 0) throw RejectedInput("episodes must be >= 0");
  if (candidates < 1) throw RejectedInput("candidates must be >= 1");
  if (eval_every < 1) throw RejectedInput("eval_every must be >= 1");
  if (!(lr > 0.0)) throw RejectedInput("lr must be > 0");
  for (double e : {explore_start, explore_end, explore_decay_fraction}) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw RejectedInput("exploration settings must lie in [0,1]");
    }
  }
}

double CapiConfig::ExploreAt(int episode) const {
  const double horizon = explore_decay_fraction * episodes;
  if (horizon <= 0.0 || episode >= horizon) return explore_end;
  const double t = episode / horizon;
  return explore_start + t * (explore_end - explore_start);
}

PublicState PublicState::Initial(const GameConfig& game) {
  PublicState s;
  s.belief = InitialBelief(game);
  return s;
}

std::vector<double> PublicState::Encode(const GameConfig& game) const {
  return coopattack::Encode(game, belief, utt1, utt2);
}

ValueView::ValueView(const ValueNet& net, const GameConfig& game,
                     const AttackSpec& attack)
    : net_(&net),
      fgsm_(BeliefFgsmOptions(attack, game.num_items)),
      active_(attack.active()) {
  if (net.input_dim() != EncodedSize(game)) {
    throw RejectedInput("network input does not match the belief encoding");
  }
}

std::vector<double> ValueView::Represent(std::span<const double> x) const {
  if (!active_) return std::vector<double>(x.begin(), x.end());
  return FgsmPerturb(*net_, x, fgsm_);
}

double ValueView::operator()(std::span<const double> x) const {
  if (!active_) return net_->Forward(x);
  return net_->Forward(FgsmPerturb(*net_, x, fgsm_));
}

UtterancePrescription IdentityUtterancePrescription(const GameConfig& game) {
  UtterancePrescription p;
  for (int i = 0; i < game.num_items; ++i) {
    p.utterance.push_back(i % game.num_utterances);
  }
  return p;
}

JointTradePrescription BeliefArgmaxTrade(const GameConfig& game,
                                         const Belief& b) {
  const int guess_item2 = ArgmaxFirst(b.p2);
  const int guess_item1 = ArgmaxFirst(b.p1);
  JointTradePrescription p;
  for (int i = 0; i < game.num_items; ++i) {
    p.player1.request.push_back({i, guess_item2});
    p.player2.request.push_back({i, guess_item1});
  }
  return p;
}

std::vector<UtterancePrescription> UtteranceCandidates(const GameConfig& game,
                                                       int k, Rng& rng) {
  std::uniform_int_distribution<int> utt(0, game.num_utterances - 1);
  std::vector<UtterancePrescription> out(k);
  for (UtterancePrescription& p : out) {
    p.utterance.resize(game.num_items);
    for (int& u : p.utterance) u = utt(rng);
  }
  out.push_back(IdentityUtterancePrescription(game));
  return out;
}

std::vector<JointTradePrescription> TradeCandidates(const GameConfig& game,
                                                    const Belief& b, int k,
                                                    Rng& rng) {
  std::uniform_int_distribution<int> item(0, game.num_items - 1);
  std::vector<JointTradePrescription> out(k);
  for (JointTradePrescription& p : out) {
    for (TradePrescription* side : {&p.player1, &p.player2}) {
      side->request.resize(game.num_items);
      for (int i = 0; i < game.num_items; ++i) {
        side->request[i] = {i, item(rng)};
      }
    }
  }
  out.push_back(BeliefArgmaxTrade(game, b));
  return out;
}

double AssessUtterancePrescription(const ValueView& value,
                                   const GameConfig& game,
                                   const PublicState& state,
                                   const UtterancePrescription& presc) {
  ValidatePrescription(game, presc);
  const std::vector<double>& prior = state.belief.of(Actor(state.phase));
  double total = 0.0;
  for (int i = 0; i < game.num_items; ++i) {
    if (prior[i] <= 0.0) continue;
    const PublicState next = Successor(state, presc, presc.utterance[i]);
    total += prior[i] * value(next.Encode(game));
  }
  return total;
}

double AssessPrescription(const ValueNet& net, const GameConfig& game,
                          const PublicState& state,
                          const UtterancePrescription& presc) {
  return AssessUtterancePrescription(ValueView(net, game), game, state, presc);
}

double AssessTradePrescription(const Belief& b,
                               const JointTradePrescription& presc) {
  const int n = static_cast<int>(b.p1.size());
  if (static_cast<int>(presc.player1.request.size()) != n ||
      static_cast<int>(presc.player2.request.size()) != n) {
    throw RejectedInput("trade prescription must have one entry per item");
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (b.p1[i] <= 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (b.p2[j] <= 0.0) continue;
      if (TradeSucceeds(i, j, presc.player1.request[i],
                        presc.player2.request[j])) {
        total += b.p1[i] * b.p2[j];
      }
    }
  }
  return total;
}

std::vector<double> SerialAssess(
    const ValueView& value, const GameConfig& game, const PublicState& state,
    std::span<const UtterancePrescription> candidates) {
  std::vector<double> out(candidates.size());
  kernels::SerialMap(out, [&](int c) {
    return AssessUtterancePrescription(value, game, state, candidates[c]);
  });
  return out;
}

std::vector<double> ParallelAssess(
    const ValueView& value, const GameConfig& game, const PublicState& state,
    std::span<const UtterancePrescription> candidates) {
  const std::vector<double>& prior = state.belief.of(Actor(state.phase));
  const int n = game.num_items;

  // A successor belief is fixed by the utterance and the set of items with
  // prior mass that map to it; many candidates share successors.
  std::map<std::pair<int, std::vector<bool>>, int> index;
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<int>> slot(candidates.size(), std::vector<int>(n, -1));
  for (size_t c = 0; c < candidates.size(); ++c) {
    const UtterancePrescription& presc = candidates[c];
    ValidatePrescription(game, presc);
    for (int i = 0; i < n; ++i) {
      if (prior[i] <= 0.0) continue;
      const int u = presc.utterance[i];
      std::vector<bool> members(n);
      for (int j = 0; j < n; ++j) {
        members[j] = presc.utterance[j] == u && prior[j] > 0.0;
      }
      auto [it, inserted] =
          index.try_emplace({u, std::move(members)}, static_cast<int>(inputs.size()));
      if (inserted) inputs.push_back(Successor(state, presc, u).Encode(game));
      slot[c][i] = it->second;
    }
  }

  std::vector<double> values(inputs.size());
  kernels::ParallelMap(values, [&](int q) { return value(inputs[q]); });

  std::vector<double> out(candidates.size());
  for (size_t c = 0; c < candidates.size(); ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      if (slot[c][i] >= 0) total += prior[i] * values[slot[c][i]];
    }
    out[c] = total;
  }
  return out;
}

int SelectIndex(std::span<const double> values, double explore, Rng* rng) {
  if (values.empty()) throw RejectedInput("empty candidate set");
  if (explore > 0.0 && rng != nullptr) {
    std::bernoulli_distribution coin(explore);
    if (coin(*rng)) {
      std::uniform_int_distribution<int> pick(
          0, static_cast<int>(values.size()) - 1);
      return pick(*rng);
    }
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

UtterancePrescription IdentityCoordinator::ChooseUtterance(const PublicState&) {
  return IdentityUtterancePrescription(game_);
}

JointTradePrescription IdentityCoordinator::ChooseTrade(
    const PublicState& state) {
  return BeliefArgmaxTrade(game_, state.belief);
}

GreedyCoordinator::GreedyCoordinator(const ValueNet& net, GameConfig game,
                                     int k, std::uint64_t eval_seed,
                                     const AttackSpec& attack)
    : value_(net, game, attack), game_(game), k_(k), eval_seed_(eval_seed) {}

Rng GreedyCoordinator::StreamFor(const PublicState& state) const {
  return MakeRng({eval_seed_, static_cast<std::uint64_t>(state.phase),
                  state.utt1 ? static_cast<std::uint64_t>(*state.utt1 + 1) : 0,
                  state.utt2 ? static_cast<std::uint64_t>(*state.utt2 + 1) : 0});
}

UtterancePrescription GreedyCoordinator::ChooseUtterance(
    const PublicState& state) {
  Rng rng = StreamFor(state);
  std::vector<UtterancePrescription> cands = UtteranceCandidates(game_, k_, rng);
  const std::vector<double> values = ParallelAssess(value_, game_, state, cands);
  return cands[SelectIndex(values, 0.0, nullptr)];
}

JointTradePrescription GreedyCoordinator::ChooseTrade(
    const PublicState& state) {
  Rng rng = StreamFor(state);
  std::vector<JointTradePrescription> cands =
      TradeCandidates(game_, state.belief, k_, rng);
  std::vector<double> values(cands.size());
  for (size_t c = 0; c < cands.size(); ++c) {
    values[c] = AssessTradePrescription(state.belief, cands[c]);
  }
  return cands[SelectIndex(values, 0.0, nullptr)];
}

double ExpectedReturn(const GameConfig& game, Coordinator& coordinator) {
  game.Validate();
  // Decisions depend only on public information, so cache them per history.
  std::map<std::pair<int, int>, UtterancePrescription> second;
  std::map<std::pair<int, int>, JointTradePrescription> trades;

  const PublicState root = PublicState::Initial(game);
  const UtterancePrescription first = coordinator.ChooseUtterance(root);
  ValidatePrescription(game, first);

  int successes = 0;
  for (int item1 = 0; item1 < game.num_items; ++item1) {
    for (int item2 = 0; item2 < game.num_items; ++item2) {
      GameState s = DealItems(game, item1, item2);
      const int u1 = first.utterance[item1];
      s = ApplyUtterance(s, u1);
      const PublicState mid = Successor(root, first, u1);
      auto it2 = second.find({u1, -1});
      if (it2 == second.end()) {
        UtterancePrescription p = coordinator.ChooseUtterance(mid);
        ValidatePrescription(game, p);
        it2 = second.emplace(std::pair{u1, -1}, std::move(p)).first;
      }
      const int u2 = it2->second.utterance[item2];
      s = ApplyUtterance(s, u2);
      auto it3 = trades.find({u1, u2});
      if (it3 == trades.end()) {
        const PublicState last = Successor(mid, it2->second, u2);
        JointTradePrescription p = coordinator.ChooseTrade(last);
        ValidatePrescription(game, p.player1);
        ValidatePrescription(game, p.player2);
        it3 = trades.emplace(std::pair{u1, u2}, std::move(p)).first;
      }
      s = ResolveTrade(s, it3->second.player1.request[item1],
                       it3->second.player2.request[item2]);
      successes += s.reward();
    }
  }
  return static_cast<double>(successes) / (game.num_items * game.num_items);
}

double Evaluate(const ValueNet& net, const GameConfig& game, int k,
                std::uint64_t eval_seed, const AttackSpec& attack) {
  GreedyCoordinator coordinator(net, game, k, eval_seed, attack);
  return ExpectedReturn(game, coordinator);
}

std::vector<TrainRecord> Train(const CapiConfig& cfg, const GameConfig& game,
                               const AttackSpec& attack, ValueNet* trained) {
  cfg.Validate();
  game.Validate();
  Rng rng = MakeRng({cfg.seed});
  ValueNet net(MakeLayerDims(EncodedSize(game), cfg.hidden), rng,
               cfg.activation);
  AdamOptimizer adam(net, cfg.lr);
  auto regress = [&](std::span<const double> x, double target) {
    const GradientReport g = net.Backward(x, net.Forward(x) - target);
    if (cfg.optimizer == Optimizer::kAdam) {
      adam.Step(net, g);
    } else {
      net.ApplySgd(g, cfg.lr);
    }
  };
  const AttackSpec eval_attack = cfg.perturb_eval ? attack : AttackSpec{};
  std::vector<TrainRecord> records;
  std::vector<std::pair<std::vector<double>, double>> replay;
  int replay_next = 0;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double explore = cfg.ExploreAt(ep);
    const ValueView view(net, game, attack);
    GameState s = Deal(game, rng);
    PublicState pub = PublicState::Initial(game);
    std::vector<std::vector<double>> seen;
    std::vector<double> assessed;

    for (Player actor : {Player::kOne, Player::kTwo}) {
      seen.push_back(view.Represent(pub.Encode(game)));
      const std::vector<UtterancePrescription> cands =
          UtteranceCandidates(game, cfg.candidates, rng);
      const std::vector<double> values = ParallelAssess(view, game, pub, cands);
      const int pick = SelectIndex(values, explore, &rng);
      const UtterancePrescription& chosen = cands[pick];
      assessed.push_back(cfg.targets == ValueTarget::kGreedy
                             ? *std::max_element(values.begin(), values.end())
                             : values[pick]);
      const int u = chosen.utterance[s.item(actor)];
      s = ApplyUtterance(s, u);
      pub = Successor(pub, chosen, u);
    }

    seen.push_back(view.Represent(pub.Encode(game)));
    const std::vector<JointTradePrescription> trades =
        TradeCandidates(game, pub.belief, cfg.candidates, rng);
    std::vector<double> trade_values(trades.size());
    for (size_t c = 0; c < trades.size(); ++c) {
      trade_values[c] = AssessTradePrescription(pub.belief, trades[c]);
    }
    const int pick = SelectIndex(trade_values, explore, &rng);
    const JointTradePrescription& trade = trades[pick];
    assessed.push_back(
        cfg.targets == ValueTarget::kGreedy
            ? *std::max_element(trade_values.begin(), trade_values.end())
            : trade_values[pick]);
    s = ResolveTrade(s, trade.player1.request[s.item(Player::kOne)],
                     trade.player2.request[s.item(Player::kTwo)]);
    const double reward = s.reward();

    // Squared-error regression toward the value target of each decision.
    for (size_t d = 0; d < seen.size(); ++d) {
      std::vector<double>& x = seen[d];
      const double target =
          cfg.targets == ValueTarget::kMonteCarlo ? reward : assessed[d];
      regress(x, target);
      if (cfg.replay_capacity > 0) {
        if (static_cast<int>(replay.size()) < cfg.replay_capacity) {
          replay.push_back({std::move(x), target});
        } else {
          replay[replay_next] = {std::move(x), target};
        }
        replay_next = (replay_next + 1) % cfg.replay_capacity;
      }
    }
    if (!replay.empty()) {
      std::uniform_int_distribution<int> pick(
          0, static_cast<int>(replay.size()) - 1);
      for (int r = 0; r < cfg.replay_updates; ++r) {
        const auto& [x, t] = replay[pick(rng)];
        regress(x, t);
      }
    }

    if ((ep + 1) % cfg.eval_every == 0) {
      const double ret =
          Evaluate(net, game, cfg.candidates, cfg.eval_seed, eval_attack);
      records.push_back({ep + 1, ret, attack.kind, attack.epsilon});
    }
  }
  if (trained != nullptr) *trained = std::move(net);
  return records;
}

}  // namespace coopattack
