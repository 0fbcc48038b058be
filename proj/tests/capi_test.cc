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

#include <cmath>
#include <vector>

#include "coopattack/errors.h"
#include "coopattack/rng.h"
#include "doctest.h"
#include "oracles.h"

namespace coopattack {
namespace {

JointTradePrescription ConstantGuess(int n, int guess1, int guess2) {
  JointTradePrescription p;
  for (int i = 0; i < n; ++i) {
    p.player1.request.push_back({i, guess2});
    p.player2.request.push_back({i, guess1});
  }
  return p;
}

TEST_CASE("trade assessment is the exact expected reward") {
  const Belief point{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  CHECK(AssessTradePrescription(point, ConstantGuess(3, 1, 2)) == 1.0);
  CHECK(AssessTradePrescription(point, ConstantGuess(3, 0, 2)) == 0.0);
  const Belief uniform = InitialBelief({2, 2});
  CHECK(AssessTradePrescription(uniform, ConstantGuess(2, 0, 0)) == 0.25);
  // Guessing "the other item" on both sides matches half the deals.
  JointTradePrescription swap;
  swap.player1.request = {{0, 1}, {1, 0}};
  swap.player2.request = {{0, 1}, {1, 0}};
  CHECK(AssessTradePrescription(uniform, swap) == 0.5);
}

TEST_CASE("utterance assessment with a zero net is zero") {
  const GameConfig game{4, 4};
  const ValueNet net = ValueNet::Zeros(MakeLayerDims(EncodedSize(game)));
  Rng rng = MakeRng({1});
  const PublicState s = PublicState::Initial(game);
  for (const auto& presc : UtteranceCandidates(game, 16, rng)) {
    CHECK(AssessPrescription(net, game, s, presc) == 0.0);
  }
}

TEST_CASE("utterance assessment sums belief-weighted successor values") {
  const GameConfig game{3, 2};
  Rng rng = MakeRng({2});
  const ValueNet net(MakeLayerDims(EncodedSize(game), {8}), rng);
  PublicState s = PublicState::Initial(game);
  s.belief.p1 = {0.2, 0.5, 0.3};
  const UtterancePrescription presc{{1, 0, 1}};
  double oracle = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int u = presc.utterance[i];
    const Belief post = UpdateBelief(s.belief, presc, u, Player::kOne);
    oracle += s.belief.p1[i] * net.Forward(Encode(game, post, u, std::nullopt));
  }
  CHECK(AssessPrescription(net, game, s, presc) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("candidate sets end with the canonical prescription") {
  const GameConfig game{4, 4};
  Rng rng = MakeRng({3});
  const auto utt = UtteranceCandidates(game, 5, rng);
  CHECK(utt.size() == 6);
  CHECK(utt.back().utterance == std::vector<int>{0, 1, 2, 3});
  const Belief b{{0.1, 0.6, 0.2, 0.1}, {0.0, 0.0, 0.3, 0.7}};
  const auto trades = TradeCandidates(game, b, 5, rng);
  CHECK(trades.size() == 6);
  for (const auto& t : trades) {
    for (int i = 0; i < 4; ++i) {
      CHECK(t.player1.request[i].give == i);
      CHECK(t.player2.request[i].give == i);
    }
  }
  CHECK(trades.back().player1.request[0].want == 3);
  CHECK(trades.back().player2.request[0].want == 1);
}

TEST_CASE("selection takes the first maximum") {
  const std::vector<double> v = {0.2, 0.9, 0.9};
  CHECK(SelectIndex(v, 0.0, nullptr) == 1);
  CHECK(SelectIndex(std::vector<double>{0.4}, 0.0, nullptr) == 0);
  Rng rng = MakeRng({4});
  for (int k = 0; k < 100; ++k) CHECK(SelectIndex(v, 0.0, &rng) == 1);
  CHECK_THROWS_AS(SelectIndex(std::vector<double>{}, 0.0, nullptr), RejectedInput);
  int explored = 0;
  for (int k = 0; k < 1000; ++k) explored += SelectIndex(v, 1.0, &rng) != 1;
  CHECK(explored > 200);
}

TEST_CASE("parallel and serial candidate assessment agree bit for bit") {
  const GameConfig game{4, 4};
  Rng rng = MakeRng({5});
  for (int k = 0; k < 20; ++k) {
    const ValueNet net(MakeLayerDims(EncodedSize(game), {16, 16}), rng);
    AttackSpec attack;
    if (k % 2) attack = AttackSpec{AttackKind::kFgsm, 0.3};
    const ValueView view(net, game, attack);
    PublicState s = PublicState::Initial(game);
    if (k % 3 == 0) {
      s.phase = Phase::kUtterance2;
      s.utt1 = 2;
      s.belief.p1 = {0.0, 0.5, 0.5, 0.0};
    }
    const auto cands = UtteranceCandidates(game, 64, rng);
    CHECK(ParallelAssess(view, game, s, cands) == SerialAssess(view, game, s, cands));
  }
}

TEST_CASE("exploration schedule decays linearly over the first half") {
  CapiConfig cfg;
  cfg.episodes = 2000;
  CHECK(cfg.ExploreAt(0) == 0.5);
  CHECK(cfg.ExploreAt(500) == doctest::Approx(0.275));
  CHECK(cfg.ExploreAt(1000) == 0.05);
  CHECK(cfg.ExploreAt(1999) == 0.05);
}

TEST_CASE("evaluation of canonical coordinators") {
  IdentityCoordinator identity({4, 4});
  CHECK(ExpectedReturn({4, 4}, identity) == 1.0);
  Rng rng = MakeRng({6});
  const ValueNet net(MakeLayerDims(EncodedSize({1, 1})), rng);
  CHECK(Evaluate(net, {1, 1}, 8) == 1.0);
}

TEST_CASE("evaluation never beats the exhaustive optimum") {
  Rng rng = MakeRng({7});
  for (auto game : {GameConfig{2, 1}, GameConfig{3, 1}, GameConfig{2, 2}, GameConfig{3, 2}}) {
    const double bound = testing::BruteForceOptimum(game.num_items, game.num_utterances);
    for (int k = 0; k < 10; ++k) {
      const ValueNet net(MakeLayerDims(EncodedSize(game), {8}), rng);
      const double v = Evaluate(net, game, 16, 100 + k);
      CHECK(v >= 0.0);
      CHECK(v <= bound + 1e-12);
    }
  }
}

TEST_CASE("evaluation is deterministic in the evaluation seed") {
  const GameConfig game{4, 4};
  Rng rng = MakeRng({8});
  const ValueNet net(MakeLayerDims(EncodedSize(game)), rng);
  CHECK(Evaluate(net, game, 32, 99) == Evaluate(net, game, 32, 99));
}

TEST_CASE("training bookkeeping") {
  const GameConfig game{2, 2};
  CapiConfig cfg;
  cfg.episodes = 0;
  CHECK(Train(cfg, game, {}).empty());

  cfg.episodes = 100;
  cfg.eval_every = 20;
  cfg.candidates = 8;
  cfg.seed = 3;
  const auto a = Train(cfg, game, {});
  REQUIRE(a.size() == 5);
  for (size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].episode == 20 * static_cast<int>(k + 1));
    CHECK((a[k].eval_return >= 0.0 && a[k].eval_return <= 1.0));
    CHECK(a[k].attack_kind == AttackKind::kNone);
  }
  const auto b = Train(cfg, game, {});
  for (size_t k = 0; k < a.size(); ++k) CHECK(a[k].eval_return == b[k].eval_return);

  const AttackSpec attack{AttackKind::kFgsm, 0.7};
  ValueNet trained = ValueNet::Zeros({1, 1});
  const auto c = Train(cfg, game, attack, &trained);
  CHECK(c.back().attack_kind == AttackKind::kFgsm);
  CHECK(c.back().epsilon == 0.7);
  CHECK(trained.AllFinite());
  CHECK(trained.input_dim() == EncodedSize(game));

  cfg.candidates = 0;
  CHECK_THROWS_AS(Train(cfg, game, {}), RejectedInput);
}

TEST_CASE("a small game is solved quickly") {
  const GameConfig game{2, 2};
  CapiConfig cfg;
  cfg.episodes = 400;
  cfg.eval_every = 50;
  cfg.candidates = 16;
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    cfg.seed = seed;
    solved += Train(cfg, game, {}).back().eval_return > 0.99;
  }
  CHECK(solved == 3);
}

}  // namespace
}  // namespace coopattack
