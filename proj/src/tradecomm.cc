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

#include <string>

#include "coopattack/errors.h"

namespace coopattack {

void GameConfig::Validate() const {
  if (num_items < 1) throw RejectedInput("num_items must be >= 1");
  if (num_utterances < 1) throw RejectedInput("num_utterances must be >= 1");
}

std::string PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kDeal: return "Deal";
    case Phase::kUtterance1: return "Utterance1";
    case Phase::kUtterance2: return "Utterance2";
    case Phase::kTrade: return "Trade";
    case Phase::kTerminal: return "Terminal";
  }
  return "?";
}

GameState::GameState(GameConfig cfg) : cfg_(cfg) { cfg_.Validate(); }

int GameState::reward() const {
  if (!reward_) throw RejectedMove("reward is defined only at Terminal");
  return *reward_;
}

GameState DealItems(const GameConfig& cfg, int item1, int item2) {
  GameState s(cfg);
  if (item1 < 0 || item1 >= cfg.num_items || item2 < 0 ||
      item2 >= cfg.num_items) {
    throw RejectedMove("dealt item out of range");
  }
  s.item1_ = item1;
  s.item2_ = item2;
  s.phase_ = Phase::kUtterance1;
  return s;
}

GameState Deal(const GameConfig& cfg, Rng& rng) {
  cfg.Validate();
  std::uniform_int_distribution<int> item(0, cfg.num_items - 1);
  const int item1 = item(rng);
  const int item2 = item(rng);
  return DealItems(cfg, item1, item2);
}

GameState ApplyUtterance(const GameState& s, int utterance) {
  if (s.phase_ != Phase::kUtterance1 && s.phase_ != Phase::kUtterance2) {
    throw RejectedMove("utterance not allowed in phase " + PhaseName(s.phase_));
  }
  if (utterance < 0 || utterance >= s.cfg_.num_utterances) {
    throw RejectedMove("utterance " + std::to_string(utterance) +
                       " out of range");
  }
  GameState next = s;
  if (s.phase_ == Phase::kUtterance1) {
    next.utt1_ = utterance;
    next.phase_ = Phase::kUtterance2;
  } else {
    next.utt2_ = utterance;
    next.phase_ = Phase::kTrade;
  }
  return next;
}

GameState ResolveTrade(const GameState& s, TradeRequest req1,
                       TradeRequest req2) {
  if (s.phase_ != Phase::kTrade) {
    throw RejectedMove("trade not allowed in phase " + PhaseName(s.phase_));
  }
  const int n = s.cfg_.num_items;
  for (const TradeRequest& r : {req1, req2}) {
    if (r.give < 0 || r.give >= n || r.want < 0 || r.want >= n) {
      throw RejectedMove("trade request out of range");
    }
  }
  GameState next = s;
  next.request1_ = req1;
  next.request2_ = req2;
  next.reward_ = TradeSucceeds(s.item1_, s.item2_, req1, req2) ? 1 : 0;
  next.phase_ = Phase::kTerminal;
  return next;
}

}  // namespace coopattack
