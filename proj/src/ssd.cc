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

#include "coopattack/ssd.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "coopattack/errors.h"
#include "coopattack/kernels.h"
#include "coopattack/stats.h"

namespace coopattack::ssd {
namespace {

struct EpisodeReturn {
  double r1 = 0.0;
  double r2 = 0.0;
};

EpisodeReturn Rollout(const MarkovGame& game, const Policy& policy1,
                      const Policy& policy2, int start, double gamma,
                      Rng& rng) {
  EpisodeReturn ret;
  int state = start;
  double discount = 1.0;
  while (true) {
    const int a1 = policy1(state, 0, rng);
    const int a2 = policy2(state, 1, rng);
    const Transition t = game.Step(state, a1, a2, rng);
    ret.r1 += discount * t.reward1;
    ret.r2 += discount * t.reward2;
    discount *= gamma;
    if (t.terminal || discount < kDiscountCutoff) break;
    state = t.next_state;
  }
  return ret;
}

void CheckEstimateArgs(int episodes, double gamma) {
  if (episodes < 1) throw RejectedInput("episodes must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw RejectedInput("gamma must lie in [0,1); undiscounted rollouts of a "
                        "non-terminating game are rejected");
  }
}

ValueEstimate Reduce(std::span<const double> r1, std::span<const double> r2) {
  const MeanStats s1 = ComputeMeanStats(r1);
  const MeanStats s2 = ComputeMeanStats(r2);
  ValueEstimate e;
  e.value1 = s1.mean;
  e.value2 = s2.mean;
  e.stderr1 = s1.stderr_mean;
  e.stderr2 = s2.stderr_mean;
  std::vector<double> diff(r1.size());
  for (size_t k = 0; k < r1.size(); ++k) diff[k] = r1[k] - r2[k];
  e.stderr_diff = ComputeMeanStats(diff).stderr_mean;
  e.episodes = static_cast<int>(r1.size());
  return e;
}

template <class MapFn>
ValueEstimate Estimate(const MarkovGame& game, const Policy& policy1,
                       const Policy& policy2, int start, int episodes,
                       double gamma, Rng& rng, MapFn map) {
  CheckEstimateArgs(episodes, gamma);
  const std::uint64_t base = rng();
  std::vector<double> r1(episodes);
  std::vector<double> r2(episodes);
  // Each episode writes both returns; the map drives player 1's slot.
  map(std::span<double>(r1), [&](int e) {
    Rng stream = MakeRng({base, static_cast<std::uint64_t>(e)});
    const EpisodeReturn ret = Rollout(game, policy1, policy2, start, gamma, stream);
    r2[e] = ret.r2;
    return ret.r1;
  });
  return Reduce(r1, r2);
}

}  // namespace

std::string ConditionName(Condition c) {
  switch (c) {
    case Condition::kRewardOverPunishment: return "R>P";
    case Condition::kRewardOverSucker: return "R>S";
    case Condition::kRewardOverAlternation: return "2R>T+S";
    case Condition::kGreedOrFear: return "T>R|P>S";
  }
  return "?";
}

DilemmaVerdict Classify(const MgsdPayoffs& p) {
  for (double v : {p.reward, p.punishment, p.sucker, p.temptation}) {
    if (!std::isfinite(v)) throw RejectedInput("payoffs must be finite");
  }
  DilemmaVerdict v;
  v.greed = p.temptation > p.reward;
  v.fear = p.punishment > p.sucker;
  const std::pair<Condition, bool> checks[] = {
      {Condition::kRewardOverPunishment, p.reward > p.punishment},
      {Condition::kRewardOverSucker, p.reward > p.sucker},
      {Condition::kRewardOverAlternation,
       2.0 * p.reward > p.temptation + p.sucker},
      {Condition::kGreedOrFear, v.greed || v.fear},
  };
  for (const auto& [condition, holds] : checks) {
    if (!holds) v.failed_conditions.push_back(condition);
  }
  v.is_dilemma = v.failed_conditions.empty();
  return v;
}

Policy AlwaysCooperate() {
  return [](int, int, Rng&) { return kCooperate; };
}

Policy AlwaysDefect() {
  return [](int, int, Rng&) { return kDefect; };
}

Policy DefectWithProbability(double p) {
  const double q = std::clamp(p, 0.0, 1.0);
  return [q](int, int, Rng& rng) {
    std::bernoulli_distribution defect(q);
    return defect(rng) ? kDefect : kCooperate;
  };
}

IteratedMatrixGame::IteratedMatrixGame(
    std::array<std::array<std::array<double, 2>, 2>, 2> payoff)
    : payoff_(payoff) {}

IteratedMatrixGame IteratedMatrixGame::Symmetric(double r, double s, double t,
                                                 double p) {
  std::array<std::array<std::array<double, 2>, 2>, 2> payoff{};
  payoff[0][kCooperate][kCooperate] = r;
  payoff[0][kCooperate][kDefect] = s;
  payoff[0][kDefect][kCooperate] = t;
  payoff[0][kDefect][kDefect] = p;
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) payoff[1][a1][a2] = payoff[0][a2][a1];
  }
  return IteratedMatrixGame(payoff);
}

Transition IteratedMatrixGame::Step(int, int action1, int action2,
                                    Rng&) const {
  if (action1 < 0 || action1 > 1 || action2 < 0 || action2 > 1) {
    throw RejectedMove("matrix game actions are 0 (cooperate) or 1 (defect)");
  }
  Transition t;
  t.next_state = 1 + 2 * action1 + action2;
  t.reward1 = payoff_[0][action1][action2];
  t.reward2 = payoff_[1][action1][action2];
  return t;
}

ValueEstimate EstimateValue(const MarkovGame& game, const Policy& policy1,
                            const Policy& policy2, int start, int episodes,
                            double gamma, Rng& rng) {
  return Estimate(game, policy1, policy2, start, episodes, gamma, rng,
                  [](std::span<double> out, auto&& fn) {
                    kernels::ParallelMap(out, fn);
                  });
}

ValueEstimate EstimateValueSerial(const MarkovGame& game,
                                  const Policy& policy1, const Policy& policy2,
                                  int start, int episodes, double gamma,
                                  Rng& rng) {
  return Estimate(game, policy1, policy2, start, episodes, gamma, rng,
                  [](std::span<double> out, auto&& fn) {
                    kernels::SerialMap(out, fn);
                  });
}

MgsdPayoffs InduceMgsd(const MarkovGame& game, const Policy& cooperative,
                       const Policy& defecting, int start, int episodes,
                       double gamma, Rng& rng) {
  const ValueEstimate cc =
      EstimateValue(game, cooperative, cooperative, start, episodes, gamma, rng);
  const ValueEstimate dd =
      EstimateValue(game, defecting, defecting, start, episodes, gamma, rng);
  const ValueEstimate cd =
      EstimateValue(game, cooperative, defecting, start, episodes, gamma, rng);
  const ValueEstimate dc =
      EstimateValue(game, defecting, cooperative, start, episodes, gamma, rng);

  auto check = [](const char* what, double v1, double v2, double se) {
    const double tol =
        3.0 * se + 1e-9 * std::max({1.0, std::abs(v1), std::abs(v2)});
    if (std::abs(v1 - v2) > tol) {
      throw AsymmetricGame(std::string("role-swap symmetry fails for ") + what);
    }
  };
  auto pooled = [](double a, double b) { return std::sqrt(a * a + b * b); };
  // R and P compare the two players within the same episodes, whose returns
  // are correlated, so the paired standard error is the right scale.
  check("R", cc.value1, cc.value2, cc.stderr_diff);
  check("P", dd.value1, dd.value2, dd.stderr_diff);
  check("S", cd.value1, dc.value2, pooled(cd.stderr1, dc.stderr2));
  check("T", dc.value1, cd.value2, pooled(dc.stderr1, cd.stderr2));

  MgsdPayoffs p;
  p.reward = cc.value1;
  p.punishment = dd.value1;
  p.sucker = cd.value1;
  p.temptation = dc.value1;
  p.state_label = std::to_string(start);
  return p;
}

std::string PolicyClassName(PolicyClass c) {
  switch (c) {
    case PolicyClass::kCooperative: return "cooperative";
    case PolicyClass::kDefecting: return "defecting";
    case PolicyClass::kUnclassified: return "unclassified";
  }
  return "?";
}

PolicyClass ClassifyPolicy(const SocialMetricConfig& cfg,
                           std::span<const double> params) {
  if (cfg.alpha_c > cfg.alpha_d) {
    throw RejectedInput("alpha_c must not exceed alpha_d");
  }
  const double a = cfg.alpha(params);
  if (a < cfg.alpha_c) return PolicyClass::kCooperative;
  if (a > cfg.alpha_d) return PolicyClass::kDefecting;
  return PolicyClass::kUnclassified;
}

AttackerReward DefectionReward(SocialMetricConfig cfg) {
  return [cfg = std::move(cfg)](std::span<const double> params) {
    return ClassifyPolicy(cfg, params) == PolicyClass::kDefecting ? 1.0 : 0.0;
  };
}

std::function<double(std::span<const double>)> DefectionFrequencyMetric(
    const MarkovGame& game, Policy partner, int episodes, int horizon,
    std::uint64_t seed) {
  if (episodes < 1 || horizon < 1) {
    throw RejectedInput("episodes and horizon must be >= 1");
  }
  return [&game, partner = std::move(partner), episodes, horizon,
          seed](std::span<const double> params) {
    if (params.empty()) throw RejectedInput("victim needs one parameter");
    const Policy victim = DefectWithProbability(params[0]);
    int defections = 0;
    for (int e = 0; e < episodes; ++e) {
      Rng rng = MakeRng({seed, static_cast<std::uint64_t>(e)});
      int state = game.InitialState();
      for (int t = 0; t < horizon; ++t) {
        const int a1 = victim(state, 0, rng);
        const int a2 = partner(state, 1, rng);
        defections += a1 == kDefect;
        const Transition tr = game.Step(state, a1, a2, rng);
        if (tr.terminal) break;
        state = tr.next_state;
      }
    }
    return static_cast<double>(defections) / (static_cast<double>(episodes) * horizon);
  };
}

}  // namespace coopattack::ssd
