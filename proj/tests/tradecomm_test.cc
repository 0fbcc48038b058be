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

#include "coopattack/tradecomm.h"

#include <cmath>
#include <vector>

#include "coopattack/errors.h"
#include "coopattack/rng.h"
#include "doctest.h"
#include "oracles.h"

namespace coopattack {
namespace {

TEST_CASE("deal with a single item always gives item 0") {
  Rng rng = MakeRng({1});
  for (int k = 0; k < 100; ++k) {
    const GameState s = Deal({1, 1}, rng);
    CHECK(s.item(Player::kOne) == 0);
    CHECK(s.item(Player::kTwo) == 0);
    CHECK(s.phase() == Phase::kUtterance1);
  }
}

TEST_CASE("deal frequencies stay within three binomial sigmas") {
  Rng rng = MakeRng({2024});
  constexpr int kDeals = 100000;
  std::vector<int> c1(4, 0), c2(4, 0);
  for (int k = 0; k < kDeals; ++k) {
    const GameState s = Deal({4, 4}, rng);
    ++c1[s.item(Player::kOne)];
    ++c2[s.item(Player::kTwo)];
  }
  const double sigma = std::sqrt(0.25 * 0.75 / kDeals);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(c1[i] / double(kDeals) - 0.25) < 3 * sigma);
    CHECK(std::abs(c2[i] / double(kDeals) - 0.25) < 3 * sigma);
  }
}

TEST_CASE("same seed gives identical deals") {
  Rng a = MakeRng({77});
  Rng b = MakeRng({77});
  for (int k = 0; k < 50; ++k) CHECK(Deal({12, 12}, a) == Deal({12, 12}, b));
}

TEST_CASE("utterances advance the phase") {
  GameState s = DealItems({4, 4}, 1, 2);
  s = ApplyUtterance(s, 3);
  CHECK(s.utt1() == 3);
  CHECK(s.phase() == Phase::kUtterance2);
  CHECK_FALSE(s.utt2().has_value());
  s = ApplyUtterance(s, 0);
  CHECK(s.utt2() == 0);
  CHECK(s.phase() == Phase::kTrade);
  CHECK_THROWS_AS(ApplyUtterance(s, 1), RejectedMove);
  CHECK_THROWS_AS(ApplyUtterance(DealItems({4, 4}, 0, 0), 4), RejectedMove);
  CHECK_THROWS_AS(ApplyUtterance(DealItems({4, 4}, 0, 0), -1), RejectedMove);
}

GameState AtTrade(GameConfig cfg, int i1, int i2) {
  return ApplyUtterance(ApplyUtterance(DealItems(cfg, i1, i2), 0), 0);
}

TEST_CASE("trade succeeds only on the mirrored request pair") {
  const GameConfig cfg{6, 1};
  const GameState s = AtTrade(cfg, 2, 5);
  const GameState ok = ResolveTrade(s, {2, 5}, {5, 2});
  CHECK(ok.phase() == Phase::kTerminal);
  CHECK(ok.reward() == 1);
  CHECK(ResolveTrade(s, {2, 5}, {5, 3}).reward() == 0);
  CHECK(ResolveTrade(AtTrade({1, 1}, 0, 0), {0, 0}, {0, 0}).reward() == 1);
  CHECK_THROWS_AS(s.reward(), RejectedMove);
  CHECK_THROWS_AS(ResolveTrade(ok, {2, 5}, {5, 2}), RejectedMove);
  CHECK_THROWS_AS(ResolveTrade(DealItems(cfg, 0, 0), {0, 0}, {0, 0}), RejectedMove);
  CHECK_THROWS_AS(ResolveTrade(s, {6, 0}, {5, 2}), RejectedMove);
}

TEST_CASE("invalid configs are rejected") {
  CHECK_THROWS_AS(GameConfig({0, 1}).Validate(), RejectedInput);
  CHECK_THROWS_AS(GameConfig({1, 0}).Validate(), RejectedInput);
  CHECK(GameConfig{12, 12}.num_trades() == 144);
}

TEST_CASE("replaying a transcript reproduces the trajectory") {
  Rng a = MakeRng({3});
  Rng b = MakeRng({3});
  const GameState s1 = ResolveTrade(ApplyUtterance(ApplyUtterance(Deal({4, 4}, a), 1), 2), {0, 1}, {1, 0});
  const GameState s2 = ResolveTrade(ApplyUtterance(ApplyUtterance(Deal({4, 4}, b), 1), 2), {0, 1}, {1, 0});
  CHECK(s1 == s2);
}

TEST_CASE("identity signalling attains return 1 when utterances suffice") {
  for (int n = 1; n <= 4; ++n) {
    const GameConfig cfg{n, n + 1};
    int total = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        GameState s = ApplyUtterance(ApplyUtterance(DealItems(cfg, i, j), i), j);
        total += ResolveTrade(s, {i, *s.utt2()}, {j, *s.utt1()}).reward();
      }
    }
    CHECK(total == n * n);
  }
}

TEST_CASE("exhaustive optimum over deterministic joint policies") {
  // With one utterance nobody can signal, but guessing "the other item" on
  // both sides matches half of the deals at two items.
  CHECK(testing::BruteForceOptimum(2, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(testing::BruteForceOptimum(3, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(testing::BruteForceOptimum(1, 1) == 1.0);
  CHECK(testing::BruteForceOptimum(2, 2) == 1.0);
}

}  // namespace
}  // namespace coopattack
