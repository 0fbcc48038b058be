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

#ifndef COOPATTACK_TRADECOMM_H_
#define COOPATTACK_TRADECOMM_H_

#include <optional>
#include <string>

#include "coopattack/rng.h"

namespace coopattack {

// Trade Comm: each player is dealt one of num_items uniformly, player 1 then
// player 2 make a public utterance, and both privately request a trade.
// Reward is 1 for both iff the requests mirror each other.
struct GameConfig {
  int num_items = 4;
  int num_utterances = 4;

  void Validate() const;
  int num_trades() const { return num_items * num_items; }

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

enum class Phase { kDeal, kUtterance1, kUtterance2, kTrade, kTerminal };

std::string PhaseName(Phase phase);

enum class Player { kOne = 0, kTwo = 1 };

// A trade request: give this item, want that one.
struct TradeRequest {
  int give = 0;
  int want = 0;

  friend bool operator==(const TradeRequest&, const TradeRequest&) = default;
};

class GameState {
 public:
  explicit GameState(GameConfig cfg);

  const GameConfig& config() const { return cfg_; }
  Phase phase() const { return phase_; }
  int item(Player p) const { return p == Player::kOne ? item1_ : item2_; }
  std::optional<int> utt1() const { return utt1_; }
  std::optional<int> utt2() const { return utt2_; }
  std::optional<TradeRequest> request1() const { return request1_; }
  std::optional<TradeRequest> request2() const { return request2_; }
  // Defined only at kTerminal; throws RejectedMove otherwise.
  int reward() const;

  friend bool operator==(const GameState&, const GameState&) = default;

 private:
  friend GameState Deal(const GameConfig&, Rng&);
  friend GameState DealItems(const GameConfig&, int, int);
  friend GameState ApplyUtterance(const GameState&, int);
  friend GameState ResolveTrade(const GameState&, TradeRequest, TradeRequest);

  GameConfig cfg_;
  Phase phase_ = Phase::kDeal;
  int item1_ = -1;
  int item2_ = -1;
  std::optional<int> utt1_;
  std::optional<int> utt2_;
  std::optional<TradeRequest> request1_;
  std::optional<TradeRequest> request2_;
  std::optional<int> reward_;
};

// Chance move: both items i.i.d. uniform. Result is in kUtterance1.
GameState Deal(const GameConfig& cfg, Rng& rng);

// Deterministic deal, for exhaustive enumeration over all deals.
GameState DealItems(const GameConfig& cfg, int item1, int item2);

GameState ApplyUtterance(const GameState& s, int utterance);

GameState ResolveTrade(const GameState& s, TradeRequest req1,
                       TradeRequest req2);

// The success rule in isolation.
inline bool TradeSucceeds(int item1, int item2, TradeRequest req1,
                          TradeRequest req2) {
  return req1.give == item1 && req1.want == item2 && req2.give == item2 &&
         req2.want == item1;
}

}  // namespace coopattack

#endif  // COOPATTACK_TRADECOMM_H_
