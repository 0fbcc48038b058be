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

#include "coopattack/pubbelief.h"

#include <cmath>
#include <string>

#include "coopattack/errors.h"

namespace coopattack {
namespace {

void ValidateSimplex(const std::vector<double>& p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw RejectedInput(std::string(name) + " has an entry outside [0,1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw RejectedInput(std::string(name) + " does not sum to 1");
  }
}

}  // namespace

void Belief::Validate() const {
  if (p1.size() != p2.size() || p1.empty()) {
    throw RejectedInput("belief marginals must be non-empty and equal length");
  }
  ValidateSimplex(p1, "p1");
  ValidateSimplex(p2, "p2");
}

void ValidatePrescription(const GameConfig& cfg,
                          const UtterancePrescription& presc) {
  if (static_cast<int>(presc.utterance.size()) != cfg.num_items) {
    throw RejectedInput("prescription must have one entry per item");
  }
  for (int u : presc.utterance) {
    if (u < 0 || u >= cfg.num_utterances) {
      throw RejectedInput("prescribed utterance out of range");
    }
  }
}

void ValidatePrescription(const GameConfig& cfg,
                          const TradePrescription& presc) {
  if (static_cast<int>(presc.request.size()) != cfg.num_items) {
    throw RejectedInput("prescription must have one entry per item");
  }
  for (const TradeRequest& r : presc.request) {
    if (r.give < 0 || r.give >= cfg.num_items || r.want < 0 ||
        r.want >= cfg.num_items) {
      throw RejectedInput("prescribed trade out of range");
    }
  }
}

Belief InitialBelief(const GameConfig& cfg) {
  cfg.Validate();
  const double u = 1.0 / cfg.num_items;
  return Belief{std::vector<double>(cfg.num_items, u),
                std::vector<double>(cfg.num_items, u)};
}

Belief UpdateBeliefWithLikelihood(const Belief& b,
                                  std::span<const double> likelihood,
                                  Player actor) {
  const std::vector<double>& prior = b.of(actor);
  if (likelihood.size() != prior.size()) {
    throw RejectedInput("likelihood length must equal num_items");
  }
  double evidence = 0.0;
  for (size_t i = 0; i < prior.size(); ++i) evidence += likelihood[i] * prior[i];
  if (!(evidence > 0.0)) {
    throw ZeroProbabilityEvent(
        "observed action has zero probability under the public belief");
  }
  Belief post = b;
  std::vector<double>& p = post.of(actor);
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    p[i] = likelihood[i] * prior[i] / evidence;
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw NumericError("posterior drifted off the simplex");
  }
  for (double& v : p) v /= sum;
  return post;
}

Belief UpdateBelief(const Belief& b, const UtterancePrescription& presc,
                    int observed, Player actor) {
  const std::vector<double>& prior = b.of(actor);
  if (presc.utterance.size() != prior.size()) {
    throw RejectedInput("prescription must have one entry per item");
  }
  std::vector<double> likelihood(prior.size());
  for (size_t i = 0; i < prior.size(); ++i) {
    likelihood[i] = presc.utterance[i] == observed ? 1.0 : 0.0;
  }
  return UpdateBeliefWithLikelihood(b, likelihood, actor);
}

int EncodedSize(const GameConfig& cfg) {
  return 2 * cfg.num_items + 2 * cfg.num_utterances;
}

std::vector<double> Encode(const GameConfig& cfg, const Belief& b,
                           std::optional<int> utt1, std::optional<int> utt2) {
  const int n = cfg.num_items;
  if (static_cast<int>(b.p1.size()) != n || static_cast<int>(b.p2.size()) != n) {
    throw RejectedInput("belief size does not match num_items");
  }
  std::vector<double> x(EncodedSize(cfg), 0.0);
  for (int i = 0; i < n; ++i) {
    x[i] = b.p1[i];
    x[n + i] = b.p2[i];
  }
  const int base = 2 * n;
  for (auto [slot, utt] : {std::pair{0, utt1}, std::pair{1, utt2}}) {
    if (!utt) continue;
    if (*utt < 0 || *utt >= cfg.num_utterances) {
      throw RejectedInput("utterance out of range");
    }
    x[base + slot * cfg.num_utterances + *utt] = 1.0;
  }
  return x;
}

Belief DecodeBelief(const GameConfig& cfg, std::span<const double> x) {
  if (static_cast<int>(x.size()) != EncodedSize(cfg)) {
    throw RejectedInput("encoded input has the wrong length");
  }
  const int n = cfg.num_items;
  return Belief{std::vector<double>(x.begin(), x.begin() + n),
                std::vector<double>(x.begin() + n, x.begin() + 2 * n)};
}

}  // namespace coopattack
