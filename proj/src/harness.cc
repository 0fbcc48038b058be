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

#include "coopattack/harness.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "coopattack/errors.h"
#include "coopattack/meanfield.h"
#include "coopattack/rng.h"
#include "coopattack/ssd.h"
#include "coopattack/stats.h"

namespace coopattack::harness {
namespace {

constexpr char kRawHeader[] = "seed,epsilon,episode,eval_return,attack_kind";
constexpr char kSummaryHeader[] =
    "epsilon,episode,n,mean_return,ci95_low,ci95_high,optimal_frequency,"
    "optimal_ci95_low,optimal_ci95_high,halfway";

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ParseRealField(const std::string& text, const char* name, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + name + " '" + text + "'", line);
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ParseError(std::string("bad ") + name + " '" + text + "'", line);
  }
  return v;
}

long long ParseIntField(const std::string& text, const char* name, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + name + " '" + text + "'", line);
  }
  if (used != text.size()) {
    throw ParseError(std::string("bad ") + name + " '" + text + "'", line);
  }
  return v;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

double ConfigReal(const std::map<std::string, std::string>& config,
                  const std::string& key, std::optional<double> fallback) {
  auto it = config.find(key);
  if (it == config.end()) {
    if (!fallback) throw RejectedInput("missing config key '" + key + "'");
    return *fallback;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size() || !std::isfinite(v)) {
    throw RejectedInput("config key '" + key + "' is not a finite number");
  }
  return v;
}

}  // namespace

void SweepConfig::Validate() const {
  game.Validate();
  capi.Validate();
  if (epsilons.empty()) throw RejectedInput("sweep needs at least one epsilon");
  if (seeds.empty()) throw RejectedInput("sweep needs at least one seed");
  for (double e : epsilons) {
    if (!std::isfinite(e) || e < 0.0) {
      throw RejectedInput("epsilon must be finite and non-negative");
    }
  }
  if (jobs < 1) throw RejectedInput("jobs must be >= 1");
}

AttackSpec AttackFor(const SweepConfig& cfg, double epsilon) {
  if (epsilon == 0.0) return AttackSpec{};
  AttackSpec spec = cfg.attack;
  spec.epsilon = epsilon;
  return spec;
}

std::vector<RawRow> RunCell(const SweepConfig& cfg, std::uint64_t seed,
                            int epsilon_index) {
  if (epsilon_index < 0 ||
      epsilon_index >= static_cast<int>(cfg.epsilons.size())) {
    throw RejectedInput("epsilon index out of range");
  }
  const double epsilon = cfg.epsilons[epsilon_index];
  CapiConfig capi = cfg.capi;
  capi.seed = DeriveSeed({seed, static_cast<std::uint64_t>(epsilon_index)});
  const AttackSpec attack = AttackFor(cfg, epsilon);
  std::vector<RawRow> rows;
  for (const TrainRecord& r : Train(capi, cfg.game, attack)) {
    rows.push_back(RawRow{seed, epsilon, r.episode, r.eval_return, r.attack_kind});
  }
  return rows;
}

SweepResult RunSweep(const SweepConfig& cfg) {
  cfg.Validate();

  std::ofstream raw_out;
  std::ofstream summary_out;
  if (!cfg.output_path.empty()) {
    const std::filesystem::path dir(cfg.output_path);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    raw_out = OpenForWrite(dir / "raw.csv");
    summary_out = OpenForWrite(dir / "summary.csv");
  }

  const int num_eps = static_cast<int>(cfg.epsilons.size());
  const int num_seeds = static_cast<int>(cfg.seeds.size());
  const int cells = num_eps * num_seeds;
  std::vector<std::vector<RawRow>> results(cells);
  std::vector<std::exception_ptr> errors(cells);

  // Cells are independent; the kernels inside each cell stay serial because
  // nested parallel regions are inactive.
  const int saved_levels = omp_get_max_active_levels();
  omp_set_max_active_levels(1);
#pragma omp parallel for num_threads(cfg.jobs) schedule(dynamic, 1)
  for (int c = 0; c < cells; ++c) {
    try {
      results[c] = RunCell(cfg, cfg.seeds[c % num_seeds], c / num_seeds);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  omp_set_max_active_levels(saved_levels);
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult result;
  for (auto& rows : results) {
    result.raw.insert(result.raw.end(), rows.begin(), rows.end());
  }
  result.summary = Summarize(result.raw, cfg.cumulative_optimal);

  if (!cfg.output_path.empty()) {
    WriteRawCsv(raw_out, result.raw);
    WriteSummaryCsv(summary_out, result.summary);
    if (!raw_out || !summary_out) {
      throw IoError("write failed under " + cfg.output_path);
    }
  }
  return result;
}

std::string FormatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteRawCsv(std::ostream& out, const std::vector<RawRow>& rows) {
  out << kRawHeader << '\n';
  for (const RawRow& r : rows) {
    out << r.seed << ',' << FormatReal(r.epsilon) << ',' << r.episode << ','
        << FormatReal(r.eval_return) << ',' << AttackKindName(r.attack_kind)
        << '\n';
  }
}

std::vector<RawRow> ReadRawCsv(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty raw file", 1);
  ++line_no;
  if (Trim(line) != kRawHeader) {
    throw ParseError("expected header '" + std::string(kRawHeader) + "'",
                     line_no);
  }
  std::vector<RawRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != 5) {
      throw ParseError("expected 5 fields, got " + std::to_string(f.size()),
                       line_no);
    }
    RawRow r;
    const long long seed = ParseIntField(f[0], "seed", line_no);
    if (seed < 0) throw ParseError("negative seed", line_no);
    r.seed = static_cast<std::uint64_t>(seed);
    r.epsilon = ParseRealField(f[1], "epsilon", line_no);
    const long long episode = ParseIntField(f[2], "episode", line_no);
    if (episode < 0 || episode > 1'000'000'000) {
      throw ParseError("episode out of range", line_no);
    }
    r.episode = static_cast<int>(episode);
    r.eval_return = ParseRealField(f[3], "eval_return", line_no);
    try {
      r.attack_kind = ParseAttackKind(f[4]);
    } catch (const RejectedInput&) {
      throw ParseError("unknown attack_kind '" + f[4] + "'", line_no);
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<SummaryRow> Summarize(const std::vector<RawRow>& raw,
                                  bool cumulative_optimal) {
  // (epsilon, episode) -> returns in input order.
  std::map<std::pair<double, int>, std::vector<double>> groups;
  std::map<double, int> max_episode;
  for (const RawRow& r : raw) {
    groups[{r.epsilon, r.episode}].push_back(r.eval_return);
    auto [it, inserted] = max_episode.try_emplace(r.epsilon, r.episode);
    if (!inserted) it->second = std::max(it->second, r.episode);
  }

  // Cumulative mode keeps each seed's best-so-far indicator.
  std::map<std::pair<double, std::uint64_t>, std::vector<std::pair<int, double>>>
      per_seed;
  if (cumulative_optimal) {
    for (const RawRow& r : raw) {
      per_seed[{r.epsilon, r.seed}].emplace_back(r.episode, r.eval_return);
    }
    for (auto& [key, series] : per_seed) std::sort(series.begin(), series.end());
  }

  std::vector<SummaryRow> out;
  std::map<double, bool> halfway_marked;
  for (const auto& [key, returns] : groups) {
    const auto [epsilon, episode] = key;
    SummaryRow row;
    row.epsilon = epsilon;
    row.episode = episode;
    const MeanStats ret = ComputeMeanStats(returns);
    row.n = ret.n;
    row.mean_return = ret.mean;
    row.ci95_low = ret.ci95_low();
    row.ci95_high = ret.ci95_high();

    std::vector<double> hits;
    if (cumulative_optimal) {
      for (const auto& [seed_key, series] : per_seed) {
        if (seed_key.first != epsilon) continue;
        bool seen = false;
        bool reached = false;
        for (const auto& [ep, value] : series) {
          if (ep > episode) break;
          seen = true;
          reached = reached || value > kOptimalThreshold;
        }
        if (seen) hits.push_back(reached ? 1.0 : 0.0);
      }
    } else {
      for (double v : returns) hits.push_back(v > kOptimalThreshold ? 1.0 : 0.0);
    }
    const MeanStats opt = ComputeMeanStats(hits);
    row.optimal_frequency = opt.mean;
    row.optimal_ci95_low = std::max(0.0, opt.ci95_low());
    row.optimal_ci95_high = std::min(1.0, opt.ci95_high());

    if (!halfway_marked[epsilon] && 2 * episode >= max_episode[epsilon]) {
      row.halfway = true;
      halfway_marked[epsilon] = true;
    }
    out.push_back(row);
  }
  return out;
}

void WriteSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    out << FormatReal(r.epsilon) << ',' << r.episode << ',' << r.n << ','
        << FormatReal(r.mean_return) << ',' << FormatReal(r.ci95_low) << ','
        << FormatReal(r.ci95_high) << ',' << FormatReal(r.optimal_frequency)
        << ',' << FormatReal(r.optimal_ci95_low) << ','
        << FormatReal(r.optimal_ci95_high) << ',' << (r.halfway ? 1 : 0)
        << '\n';
  }
}

std::map<std::string, std::string> ReadFlatConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return ParseFlatConfig(in);
}

std::map<std::string, std::string> ParseFlatConfig(std::istream& in) {
  std::map<std::string, std::string> config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (!config.emplace(key, value).second) {
      throw ParseError("duplicate key '" + key + "'", line_no);
    }
  }
  return config;
}

void RunSsd(const std::map<std::string, std::string>& config,
            std::ostream& out) {
  static const char* const kKnown[] = {
      "payoff_cc", "payoff_cd",  "payoff_dc",
      "payoff_dd", "gamma",      "episodes",
      "seed",      "cooperative_defect_prob", "defecting_defect_prob"};
  for (const auto& [key, value] : config) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw RejectedInput("unknown ssd config key '" + key + "'");
    }
  }
  const double r = ConfigReal(config, "payoff_cc", std::nullopt);
  const double s = ConfigReal(config, "payoff_cd", std::nullopt);
  const double t = ConfigReal(config, "payoff_dc", std::nullopt);
  const double p = ConfigReal(config, "payoff_dd", std::nullopt);
  const double gamma = ConfigReal(config, "gamma", std::nullopt);
  const double episodes = ConfigReal(config, "episodes", 200.0);
  const double seed = ConfigReal(config, "seed", 1.0);
  const double coop_p = ConfigReal(config, "cooperative_defect_prob", 0.0);
  const double defect_p = ConfigReal(config, "defecting_defect_prob", 1.0);
  if (episodes < 1 || episodes != std::floor(episodes)) {
    throw RejectedInput("episodes must be a positive integer");
  }
  if (seed < 0 || seed != std::floor(seed)) {
    throw RejectedInput("seed must be a non-negative integer");
  }

  const auto game = ssd::IteratedMatrixGame::Symmetric(r, s, t, p);
  Rng rng = MakeRng({static_cast<std::uint64_t>(seed)});
  const ssd::MgsdPayoffs induced = ssd::InduceMgsd(
      game, ssd::DefectWithProbability(coop_p),
      ssd::DefectWithProbability(defect_p), game.InitialState(),
      static_cast<int>(episodes), gamma, rng);
  const ssd::MgsdPayoffs stage{r, p, s, t, std::string("stage")};

  out << "source,R,P,S,T,is_dilemma,greed,fear,failed_conditions\n";
  auto write = [&](const char* source, const ssd::MgsdPayoffs& m) {
    const ssd::DilemmaVerdict v = ssd::Classify(m);
    std::string failed;
    for (ssd::Condition c : v.failed_conditions) {
      if (!failed.empty()) failed += ';';
      failed += ssd::ConditionName(c);
    }
    out << source << ',' << FormatReal(m.reward) << ','
        << FormatReal(m.punishment) << ',' << FormatReal(m.sucker) << ','
        << FormatReal(m.temptation) << ',' << (v.is_dilemma ? 1 : 0) << ','
        << (v.greed ? 1 : 0) << ',' << (v.fear ? 1 : 0) << ',' << failed
        << '\n';
  };
  write("stage", stage);
  write("induced", induced);
}

void RunMeanfieldDemo(const MeanfieldDemoOptions& options, std::ostream& out) {
  if (options.agents < 1 || options.dim < 1) {
    throw RejectedInput("agents and dim must be positive");
  }
  if (!std::isfinite(options.epsilon) || options.epsilon < 0.0) {
    throw RejectedInput("epsilon must be finite and non-negative");
  }
  Rng rng = MakeRng({options.seed});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> data(static_cast<std::size_t>(options.agents) *
                           options.dim);
  for (double& x : data) x = unit(rng);
  const meanfield::ObservationBatch clean(options.agents, options.dim, data);

  std::vector<double> direction(options.dim, 0.0);
  direction[0] = 1.0;
  Rng net_rng = MakeRng({options.seed, 1});
  const ValueNet net(MakeLayerDims(options.dim, {16}), net_rng);

  out << "series,parameter,value\n";
  for (int n = 1; n <= options.agents; ++n) {
    const auto attacked = meanfield::CoordinatedBiasAttack(
        clean, n, options.epsilon, direction);
    out << "coordinated_bias_shift," << n << ','
        << FormatReal(meanfield::MeanShiftNorm(clean, attacked)) << '\n';
  }
  for (int n = 0; n <= options.agents; ++n) {
    const auto attacked =
        meanfield::FgsmSubsetAttack(clean, n, options.epsilon, net);
    out << "fgsm_subset_shift," << n << ','
        << FormatReal(meanfield::MeanShiftNorm(clean, attacked)) << '\n';
  }

  // A peaked distribution over 5 actions, flattened by lambda.
  const std::vector<int> actions = {0, 0, 0, 0, 0, 0, 1, 1, 2, 4};
  const auto dist = meanfield::EmpiricalActionDistribution(actions, 5);
  for (double lambda : options.lambdas) {
    const auto u = meanfield::Uniformize(dist, lambda);
    out << "entropy," << FormatReal(lambda) << ','
        << FormatReal(meanfield::Entropy(u)) << '\n';
    out << "kl_to_uniform," << FormatReal(lambda) << ','
        << FormatReal(meanfield::KlToUniform(u)) << '\n';
  }
}

}  // namespace coopattack::harness
