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

// Command-line front end: train, sweep, ssd, meanfield-demo, summarize.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coopattack/attacks.h"
#include "coopattack/errors.h"
#include "coopattack/harness.h"
#include "coopattack/valuenet.h"

namespace {

using coopattack::RejectedInput;
using coopattack::harness::SweepConfig;

// Flags shared by train and sweep. Unset optionals fall back to the config
// file, then to the library defaults.
struct RunFlags {
  std::string config_path;
  std::optional<int> items;
  std::optional<int> utterances;
  std::optional<int> episodes;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::vector<double>> epsilons;
  std::optional<std::string> attack;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<int> eval_every;
  std::optional<int> candidates;
  bool perturb_eval = false;
  bool cumulative = false;
};

void AddRunFlags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config_path, "flat key = value file");
  app->add_option("--items", f.items, "number of items");
  app->add_option("--utterances", f.utterances, "number of utterances");
  app->add_option("--episodes", f.episodes, "training episodes per run");
  app->add_option("--seeds", f.seeds, "seeds, comma separated")->delimiter(',');
  app->add_option("--epsilons", f.epsilons, "attack budgets, comma separated")
      ->delimiter(',');
  app->add_option("--attack", f.attack, "attack kind for epsilon > 0: none|fgsm");
  app->add_option("--jobs", f.jobs, "cells trained concurrently");
  app->add_option("--out", f.out, "output location");
  app->add_option("--eval-every", f.eval_every, "episodes between evaluations");
  app->add_option("--candidates", f.candidates, "random candidate prescriptions");
  app->add_flag("--perturb-eval", f.perturb_eval,
                "keep the attacker active during evaluation");
  app->add_flag("--cumulative-optimal", f.cumulative,
                "count a seed as optimal once it has ever reached the optimum");
}

template <typename T>
T ParseScalar(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) {
    throw RejectedInput("config key '" + key + "' has bad value '" + text + "'");
  }
  return v;
}

template <typename T>
std::vector<T> ParseList(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseScalar<T>(key, item));
  return out;
}

bool ParseBool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw RejectedInput("config key '" + key + "' expects true or false");
}

SweepConfig BuildSweepConfig(const RunFlags& f) {
  SweepConfig cfg;
  cfg.attack.kind = coopattack::AttackKind::kFgsm;
  if (!f.config_path.empty()) {
    for (const auto& [key, value] :
         coopattack::harness::ReadFlatConfig(f.config_path)) {
      if (key == "items") {
        cfg.game.num_items = ParseScalar<int>(key, value);
      } else if (key == "utterances") {
        cfg.game.num_utterances = ParseScalar<int>(key, value);
      } else if (key == "episodes") {
        cfg.capi.episodes = ParseScalar<int>(key, value);
      } else if (key == "seeds") {
        cfg.seeds = ParseList<std::uint64_t>(key, value);
      } else if (key == "epsilons") {
        cfg.epsilons = ParseList<double>(key, value);
      } else if (key == "attack") {
        cfg.attack.kind = coopattack::ParseAttackKind(value);
      } else if (key == "jobs") {
        cfg.jobs = ParseScalar<int>(key, value);
      } else if (key == "out") {
        cfg.output_path = value;
      } else if (key == "eval_every") {
        cfg.capi.eval_every = ParseScalar<int>(key, value);
      } else if (key == "candidates") {
        cfg.capi.candidates = ParseScalar<int>(key, value);
      } else if (key == "perturb_eval") {
        cfg.capi.perturb_eval = ParseBool(key, value);
      } else if (key == "cumulative_optimal") {
        cfg.cumulative_optimal = ParseBool(key, value);
      } else if (key == "lr") {
        cfg.capi.lr = ParseScalar<double>(key, value);
      } else if (key == "activation") {
        cfg.capi.activation = coopattack::ParseActivation(value);
      } else if (key == "replay_updates") {
        cfg.capi.replay_updates = ParseScalar<int>(key, value);
      } else if (key == "eval_seed") {
        cfg.capi.eval_seed = ParseScalar<std::uint64_t>(key, value);
      } else if (key == "targets") {
        if (value == "greedy") {
          cfg.capi.targets = coopattack::ValueTarget::kGreedy;
        } else if (value == "assessed") {
          cfg.capi.targets = coopattack::ValueTarget::kAssessed;
        } else if (value == "monte_carlo") {
          cfg.capi.targets = coopattack::ValueTarget::kMonteCarlo;
        } else {
          throw RejectedInput("targets must be greedy|assessed|monte_carlo");
        }
      } else {
        throw RejectedInput("unknown config key '" + key + "'");
      }
    }
  }
  if (f.items) cfg.game.num_items = *f.items;
  if (f.utterances) cfg.game.num_utterances = *f.utterances;
  if (f.episodes) cfg.capi.episodes = *f.episodes;
  if (f.seeds) cfg.seeds = *f.seeds;
  if (f.epsilons) cfg.epsilons = *f.epsilons;
  if (f.attack) cfg.attack.kind = coopattack::ParseAttackKind(*f.attack);
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.out) cfg.output_path = *f.out;
  if (f.eval_every) cfg.capi.eval_every = *f.eval_every;
  if (f.candidates) cfg.capi.candidates = *f.candidates;
  if (f.perturb_eval) cfg.capi.perturb_eval = true;
  if (f.cumulative) cfg.cumulative_optimal = true;
  cfg.Validate();
  return cfg;
}

// Writes to `path`, or stdout when it is empty.
template <typename Fn>
void WithOutput(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw coopattack::IoError("cannot open " + path + " for writing");
  fn(out);
  if (!out) throw coopattack::IoError("write failed: " + path);
}

int RunTrain(const RunFlags& flags) {
  SweepConfig cfg = BuildSweepConfig(flags);
  if (cfg.seeds.size() != 1 || cfg.epsilons.size() != 1) {
    throw RejectedInput("train runs one cell: pass exactly one seed and epsilon");
  }
  // A single cell uses epsilon index 0.
  const auto rows = coopattack::harness::RunCell(cfg, cfg.seeds[0], 0);
  WithOutput(cfg.output_path, [&](std::ostream& out) {
    coopattack::harness::WriteRawCsv(out, rows);
  });
  return 0;
}

int RunSweepCommand(const RunFlags& flags) {
  SweepConfig cfg = BuildSweepConfig(flags);
  if (cfg.output_path.empty()) throw RejectedInput("sweep needs --out <dir>");
  const auto result = coopattack::harness::RunSweep(cfg);
  std::cerr << "wrote " << result.raw.size() << " raw rows and "
            << result.summary.size() << " summary rows to " << cfg.output_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial attacks on cooperative multi-agent learners"};
  app.require_subcommand(1);

  RunFlags train_flags;
  auto* train = app.add_subcommand("train", "train one (seed, epsilon) cell");
  AddRunFlags(train, train_flags);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "train the full seed x epsilon grid");
  AddRunFlags(sweep, sweep_flags);

  std::string ssd_config;
  std::string ssd_out;
  auto* ssd = app.add_subcommand("ssd", "classify a stage game and its induced MGSD");
  ssd->add_option("--config", ssd_config, "flat key = value file")->required();
  ssd->add_option("--out", ssd_out, "CSV path (default stdout)");

  coopattack::harness::MeanfieldDemoOptions mf;
  std::string mf_out;
  auto* meanfield = app.add_subcommand("meanfield-demo",
                                       "mean-shift and uniformization curves");
  meanfield->add_option("--agents", mf.agents, "number of agents");
  meanfield->add_option("--dim", mf.dim, "observation dimension");
  meanfield->add_option("--epsilon", mf.epsilon, "per-agent budget");
  meanfield->add_option("--lambdas", mf.lambdas, "uniformization weights")
      ->delimiter(',');
  meanfield->add_option("--seed", mf.seed, "RNG seed");
  meanfield->add_option("--out", mf_out, "CSV path (default stdout)");

  std::string raw_path;
  std::string summary_out;
  bool cumulative = false;
  auto* summarize = app.add_subcommand("summarize", "aggregate a raw CSV");
  summarize->add_option("raw", raw_path, "raw CSV")->required();
  summarize->add_option("--out", summary_out, "CSV path (default stdout)");
  summarize->add_flag("--cumulative-optimal", cumulative,
                      "count a seed as optimal once it has ever reached it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train) return RunTrain(train_flags);
    if (*sweep) return RunSweepCommand(sweep_flags);
    if (*ssd) {
      const auto config = coopattack::harness::ReadFlatConfig(ssd_config);
      WithOutput(ssd_out, [&](std::ostream& out) {
        coopattack::harness::RunSsd(config, out);
      });
      return 0;
    }
    if (*meanfield) {
      WithOutput(mf_out, [&](std::ostream& out) {
        coopattack::harness::RunMeanfieldDemo(mf, out);
      });
      return 0;
    }
    if (*summarize) {
      std::ifstream in(raw_path);
      if (!in) throw coopattack::IoError("cannot open " + raw_path);
      const auto raw = coopattack::harness::ReadRawCsv(in);
      const auto summary = coopattack::harness::Summarize(raw, cumulative);
      WithOutput(summary_out, [&](std::ostream& out) {
        coopattack::harness::WriteSummaryCsv(out, summary);
      });
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "coopattack: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
