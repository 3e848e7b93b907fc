// fairrel/tests/acceptance.cc

// Copyright 2026 The fairrel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fairrel/ingest.h"
#include "fairrel/io.h"
#include "fairrel/priors.h"
#include "fairrel/privacy.h"
#include "fairrel/random.h"
#include "fairrel/relevance.h"
#include "fairrel/reports.h"
#include "fairrel/sampler.h"
#include "fairrel/simbias.h"

namespace fs = std::filesystem;
using namespace fairrel;

namespace {

// Tolerances and limits, one block per criterion.
constexpr double kNullBiasL1 = 0.02;
constexpr double kSingleStratumTol = 1e-9;
constexpr double kNullBiasSeconds = 5.0;
constexpr double kBiasRatio = 0.5;
constexpr double kBiasL1 = 0.05;
constexpr double kBiasSeconds = 10.0;
constexpr size_t kOverlapK = 10;
constexpr size_t kDiversityTopN = 10;
constexpr int kRandomInstances = 1000;
constexpr double kPriorSumTol = 1e-9;
constexpr double kWorkedExampleTol = 1e-12;
constexpr double kAlgebraTol = 1e-12;
constexpr int kSamplerSeeds = 1000;
constexpr double kSamplerSe = 3.0;
constexpr double kLongTailFloor = 0.9;
constexpr double kSamplerSeconds = 30.0;
constexpr double kMadTol = 0.05;
constexpr int kMadCells = 100000;
constexpr double kEpsilonLimitTol = 1e-3;

struct Outcome {
  bool pass = true;
  std::string detail;
  void Require(bool ok, const std::string &what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string Fmt(const char *format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Scores a simulated world after a round-trip through the CSV formats.
ScoringResult ScoreWorld(const SimulatedWorld &world, const WeightingConfig &weighting) {
  std::istringstream schema_in(FormatSchema(world.schema));
  const DemographicSchema schema = ParseSchema(schema_in);
  std::istringstream records_in(FormatContributions(world.records, schema));
  IngestReport report;
  auto records = ParseContributions(records_in, schema, &report, IngestOptions{true});
  std::istringstream pop_in(FormatPopulation(world.population, schema));
  const PopulationTable pop = ParsePopulation(pop_in, schema);
  ScoringOptions options;
  options.weighting = weighting;
  return ScorePipeline(std::move(records), pop, schema, options);
}

double L1(const RelevanceScores &a, const RelevanceScores &b) { return Evaluate(a, b).l1; }

Outcome NullBias() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const Scenario s = NullBiasScenario();
  const ScoringResult r = ScoreWorld(Generate(s), s.weighting);
  const double l1 = L1(r.stratified, r.unstratified);
  out.Require(l1 <= kNullBiasL1, "B=N/N_W, 5000 contributors: L1(strat,unstrat)=" +
                                     Fmt("%.4f", l1) + " <= " + Fmt("%g", kNullBiasL1));

  Scenario single = s;
  single.countries = {"A"};
  single.continents = {"X"};
  single.population = {1000};
  single.bias = {1.0};
  single.preference = {s.preference[0]};
  single.host.assign(s.NumClasses(), 0);
  const ScoringResult one = ScoreWorld(Generate(single), WeightingConfig{});
  double max_diff = 0.0;
  for (const auto &[id, p] : one.unstratified.score)
    max_diff = std::max(max_diff, std::fabs(one.stratified.score.at(id) - p));
  out.Require(max_diff <= kSingleStratumTol,
              "single stratum max|diff|=" + Fmt("%.3g", max_diff) + " <= 1e-9");
  const double t = Seconds(start);
  out.Require(t < kNullBiasSeconds, Fmt("%.2f s", t) + " < 5 s");
  return out;
}

struct BiasedRun {
  ScoringResult result;
  RelevanceScores truth;
  double seconds = 0.0;
};

const BiasedRun &Biased() {
  static const BiasedRun run = [] {
    BiasedRun r;
    const auto start = std::chrono::steady_clock::now();
    const Scenario s = DefaultScenario();
    r.result = ScoreWorld(Generate(s), s.weighting);
    r.truth = TrueRelevance(s);
    r.seconds = Seconds(start);
    return r;
  }();
  return run;
}

Outcome BiasCorrection() {
  Outcome out;
  const BiasedRun &run = Biased();
  const double strat = L1(run.result.stratified, run.truth);
  const double unstrat = L1(run.result.unstratified, run.truth);
  out.Require(strat <= kBiasRatio * unstrat, "L1 strat=" + Fmt("%.4f", strat) +
                                                 " <= 0.5 x unstrat=" + Fmt("%.4f", unstrat));
  out.Require(strat <= kBiasL1, "strat L1 <= " + Fmt("%g", kBiasL1));
  out.Require(run.seconds < kBiasSeconds, Fmt("%.2f s", run.seconds) + " < 10 s");
  return out;
}

Outcome RankingDivergence() {
  Outcome out;
  const BiasedRun &run = Biased();
  const double between = OverlapAtK(run.result.stratified, run.result.unstratified, kOverlapK).value;
  const double strat = OverlapAtK(run.result.stratified, run.truth, kOverlapK).value;
  const double unstrat = OverlapAtK(run.result.unstratified, run.truth, kOverlapK).value;
  out.Require(between < 1.0, "overlap@10(strat,unstrat)=" + Fmt("%.2f", between) + " < 1");
  out.Require(strat >= unstrat, "overlap@10 with truth: strat=" + Fmt("%.2f", strat) +
                                    " >= unstrat=" + Fmt("%.2f", unstrat));
  return out;
}

// Five countries whose contributors each favour their own ten landmarks with
// a 1/rank profile.  Without a boost the largest country fills the top-10.
size_t DistinctCountries(BoostFunction f) {
  const std::vector<std::string> countries = {"K1", "K2", "K3", "K4", "K5"};
  const std::vector<std::uint64_t> population = {1000000, 100000, 10000, 1000, 100};
  std::string schema_text = "category country\nlevels country continent\n";
  for (const auto &c : countries) schema_text += "value " + c + "\nparent " + c + " W\n";
  std::istringstream schema_in(schema_text);
  const DemographicSchema schema = ParseSchema(schema_in);

  std::map<Stratum, std::uint64_t> entries;
  std::uint64_t world = 0;
  std::vector<ContributionRecord> records;
  ClassMetadata meta;
  for (size_t h = 0; h < countries.size(); ++h) {
    entries[Stratum({static_cast<ValueId>(h)})] = population[h];
    world += population[h];
    for (size_t j = 0; j < 10; ++j) {
      const std::string id = countries[h] + "-L" + std::to_string(j);
      meta.classes[id] = ClassInfo{id, countries[h], "W"};
      records.push_back(ContributionRecord{countries[h] + "-u", id, 1000 / (j + 1),
                                           Stratum({static_cast<ValueId>(h)})});
    }
  }
  const PopulationTable pop(1, entries, world);
  ScoringOptions options;
  options.weighting = WeightingConfig{WeightingConfig::Kind::kLinear};
  options.boost.categories["country"] = CategoryBoost{f, 0};
  const ScoringResult r = ScorePipeline(records, pop, schema, options);
  const DiversityCurve curve = ComputeDiversityCurve(r.stratified, meta, {kDiversityTopN});
  return curve.points.at(0).second;
}

Outcome DiversityBoost() {
  Outcome out;
  const size_t id = DistinctCountries(BoostFunction::kIdentity);
  const size_t sq = DistinctCountries(BoostFunction::kSqrt);
  const size_t lg = DistinctCountries(BoostFunction::kLog1p);
  out.Require(sq >= id && lg >= sq, "top-10 countries identity=" + std::to_string(id) +
                                        " <= sqrt=" + std::to_string(sq) +
                                        " <= log1p=" + std::to_string(lg));
  out.Require(lg > id, "identity -> log1p strictly increases");
  return out;
}

Outcome PriorAlgebra() {
  Outcome out;
  Rng rng(20210001);
  std::istringstream schema_in(
      "category gender\nvalue F\nvalue M\nvalue N\nunavailable N\n"
      "category age\nvalue 18-24\nvalue 25-34\nvalue 35+\n"
      "category region\nvalue CA\nvalue FR\nvalue JP\nvalue KE\n");
  const DemographicSchema schema = ParseSchema(schema_in);
  double worst_sum = 0.0;
  double min_entry = 1.0;
  for (int t = 0; t < kRandomInstances; ++t) {
    std::map<Stratum, std::uint64_t> entries;
    std::uint64_t world = 0;
    for (const Stratum &h : schema.FullStrata(false)) {
      const std::uint64_t n = rng.Below(100000);
      world += n;
      if (rng.Uniform() < 0.7) entries[h] = n;
    }
    for (size_t c = 0; c < schema.NumCategories(); ++c)
      for (size_t v = 0; v < schema.NumValues(c); ++v) {
        const ValueId id = static_cast<ValueId>(v);
        if (schema.IsUnavailable(c, id)) continue;
        std::uint64_t n = 0;
        for (const Stratum &h : schema.FullStrata(false))
          if (h[c] == id) n += 1 + rng.Below(1000);
        entries[Stratum::AllWildcard(3).With(c, id)] = n;
      }
    world = std::max<std::uint64_t>(world, 24 * 1000 * 3);
    const PopulationTable pop(3, entries, world);
    ContributionMatrix::Builder b(3);
    const size_t contributors = 1 + rng.Below(200);
    for (size_t u = 0; u < contributors; ++u)
      b.Add("u" + std::to_string(u), "c",
            Stratum({static_cast<ValueId>(rng.Below(3)), static_cast<ValueId>(rng.Below(3)),
                     static_cast<ValueId>(rng.Below(4))}),
            1);
    const ContributionMatrix m = std::move(b).Build(WeightingConfig{});
    PriorPolicy policy;
    policy.join = t % 3 == 0   ? PriorPolicy::Join::kJointIfAvailable
                  : t % 3 == 1 ? PriorPolicy::Join::kProductOfMarginals
                               : PriorPolicy::Join::kConditional;
    policy.conditional_on = "region";
    const PriorVector prior = ApplyFallback(CensusPrior(pop, schema, policy), m, schema);
    worst_sum = std::max(worst_sum, std::fabs(prior.Sum() - 1.0));
    for (const auto &[h, e] : prior.entries) min_entry = std::min(min_entry, e.probability);
  }
  out.Require(worst_sum <= kPriorSumTol,
              "1000 random tables: max|sum-1|=" + Fmt("%.3g", worst_sum) + " <= 1e-9");
  out.Require(min_entry >= 0.0, "min P(h)=" + Fmt("%.3g", min_entry) + " >= 0");

  std::istringstream gender_in("category gender\nvalue F\nvalue M\nvalue X\nunavailable X\n");
  const DemographicSchema gender = ParseSchema(gender_in);
  const PopulationTable pop(1, {{Stratum({0}), 600}, {Stratum({1}), 400}}, 1000);
  ContributionMatrix::Builder b(1);
  for (int i = 0; i < 49; ++i) b.Add("u" + std::to_string(i), "c", Stratum({i % 2}), 1);
  b.Add("x", "c", Stratum({2}), 1);
  const PriorVector p =
      ApplyFallback(CensusPrior(pop, gender, PriorPolicy{}), std::move(b).Build(WeightingConfig{}),
                    gender);
  const double err = std::max({std::fabs(p.At(Stratum({0})) - 0.588),
                               std::fabs(p.At(Stratum({1})) - 0.392),
                               std::fabs(p.At(Stratum({2})) - 0.020)});
  out.Require(err <= kWorkedExampleTol,
              "fallback example (0.588,0.392,0.020) max err=" + Fmt("%.3g", err) + " <= 1e-12");
  return out;
}

Outcome UtilityAlgebra() {
  Outcome out;
  Rng rng(20210002);
  std::istringstream schema_in("category g\nvalue F\nvalue M\ncategory r\nvalue A\nvalue B\nvalue C\n");
  const DemographicSchema schema = ParseSchema(schema_in);
  double worst_linear = 0.0, worst_identity = 0.0;
  int rank_mismatch = 0;
  for (int t = 0; t < kRandomInstances; ++t) {
    std::vector<ContributionRecord> records;
    const size_t n = 10 + rng.Below(100);
    for (size_t i = 0; i < n; ++i)
      records.push_back(ContributionRecord{
          "u" + std::to_string(rng.Below(40)), "c" + std::to_string(rng.Below(15)),
          1 + rng.Below(3000),
          Stratum({static_cast<ValueId>(rng.Below(2)), static_cast<ValueId>(rng.Below(3))})});
    const ContributionMatrix m = Aggregate(records, schema, WeightingConfig{});
    const ConditionalTable cond = Conditional(m);
    PriorVector prior;
    std::map<Stratum, double> alphas;
    for (const auto &[h, row] : cond) {
      prior.entries[h] = PriorEntry{rng.UniformOpen(), PriorSource::kCensus};
      alphas[h] = 0.01 + rng.Uniform();
    }
    const double scale = 0.1 + 10.0 * rng.Uniform();
    std::map<Stratum, double> scaled = alphas;
    for (auto &[h, a] : scaled) a *= scale;
    const RelevanceScores base = Utility(cond, prior, alphas);
    const RelevanceScores big = Utility(cond, prior, scaled);
    for (const auto &[id, u] : base.raw_utility)
      worst_linear = std::max(worst_linear, std::fabs(big.raw_utility.at(id) - scale * u) /
                                                std::max(1.0, scale * u));
    const auto r1 = Normalize(base).Ranked(), r2 = Normalize(big).Ranked();
    for (size_t i = 0; i < r1.size(); ++i) rank_mismatch += r1[i].first != r2[i].first;
    const RelevanceScores naive = Normalize(Utility(cond, EmpiricalPrior(m), {}));
    for (const auto &[id, s] : UnstratifiedScores(m).score)
      worst_identity = std::max(worst_identity, std::fabs(naive.score.at(id) - s));
  }
  out.Require(worst_linear <= kAlgebraTol,
              "alpha-scaling max rel err=" + Fmt("%.3g", worst_linear) + " <= 1e-12");
  out.Require(rank_mismatch == 0, "ranking changes under scaling=" + std::to_string(rank_mismatch));
  out.Require(worst_identity <= kAlgebraTol, "identity boost + empirical prior vs unstratified max err=" +
                                                 Fmt("%.3g", worst_identity) + " <= 1e-12");
  return out;
}

RelevanceScores Normalized(const std::map<std::string, double> &raw) {
  RelevanceScores s;
  s.raw_utility = raw;
  s.score = raw;
  return Normalize(s);
}

// 1000 classes: three pinned landmark scores, the rest log-uniform.
RelevanceScores TableFiveSimplex() {
  std::map<std::string, double> raw = {
      {"giza", 0.000827}, {"tail-a", 0.000070}, {"tail-b", 0.000056}};
  Rng rng(20210003);
  std::map<std::string, double> rest;
  double rest_total = 0.0;
  for (int i = 0; i < 997; ++i) {
    const double v = std::exp(std::log(5e-5) + rng.Uniform() * (std::log(3e-3) - std::log(5e-5)));
    char id[16];
    std::snprintf(id, sizeof(id), "k%03d", i);
    rest[id] = v;
    rest_total += v;
  }
  const double target = 1.0 - (0.000827 + 0.000070 + 0.000056);
  for (auto &[id, v] : rest) raw[id] = v * target / rest_total;
  return Normalized(raw);
}

Outcome SamplerStatistics() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const RelevanceScores big = TableFiveSimplex();
  const std::uint64_t table_budget = 33858;  // 0.000827 * T ~ 28 draws

  bool sums_exact = true;
  std::map<std::string, double> mean;
  for (int seed = 0; seed < kSamplerSeeds; ++seed) {
    const SampleAllocation a = Allocate(big, table_budget, DeriveSeed(20210004, seed));
    sums_exact = sums_exact && a.Total() == table_budget;
    for (const auto &[id, n] : a.counts) mean[id] += static_cast<double>(n) / kSamplerSeeds;
  }
  out.Require(sums_exact, "multinomial sum == T for 1000 seeds");

  auto within = [&](const std::string &id, const RelevanceScores &s, std::uint64_t t,
                    const std::map<std::string, double> &m) {
    const double p = s.score.at(id);
    const double se = std::sqrt(static_cast<double>(t) * p * (1 - p) / kSamplerSeeds);
    return std::fabs(m.at(id) - static_cast<double>(t) * p) <= kSamplerSe * se;
  };
  bool table_ok = true;
  std::string table_detail;
  for (const char *id : {"giza", "tail-a", "tail-b"}) {
    table_ok = table_ok && within(id, big, table_budget, mean);
    table_detail += std::string(table_detail.empty() ? "" : ",") + Fmt("%.2f", mean.at(id)) +
                    "/" + Fmt("%.2f", table_budget * big.score.at(id));
  }
  out.Require(table_ok, "pinned classes mean/expected " + table_detail + " within 3 SE");
  size_t big_within = 0;
  for (const auto &[id, p] : big.score) big_within += within(id, big, table_budget, mean);
  out.detail += "; all 1000 classes within 3 SE: " + std::to_string(big_within) + "/1000 (info)";

  const RelevanceScores small = Normalized({{"a", 0.5}, {"b", 0.25}, {"c", 0.15}, {"d", 0.07},
                                            {"e", 0.03}});
  std::map<std::string, double> small_mean;
  for (int seed = 0; seed < kSamplerSeeds; ++seed)
    for (const auto &[id, n] : Allocate(small, 500, DeriveSeed(20210005, seed)).counts)
      small_mean[id] += static_cast<double>(n) / kSamplerSeeds;
  bool small_ok = true;
  for (const auto &[id, p] : small.score) small_ok = small_ok && within(id, small, 500, small_mean);
  out.Require(small_ok, "5-class simplex: every class within 3 SE");

  double p_min = 1.0;
  for (const auto &[id, p] : big.score) p_min = std::min(p_min, p);
  const std::uint64_t tail_budget = static_cast<std::uint64_t>(std::ceil(3.0 / p_min));
  std::map<std::string, int> hit;
  for (int seed = 0; seed < kSamplerSeeds; ++seed)
    for (const auto &[id, n] : Allocate(big, tail_budget, DeriveSeed(20210006, seed)).counts)
      hit[id] += n > 0;
  double worst = 1.0;
  for (const auto &[id, h] : hit) worst = std::min(worst, static_cast<double>(h) / kSamplerSeeds);
  out.Require(worst >= kLongTailFloor, "long tail (T=" + std::to_string(tail_budget) +
                                           ", min T*p=3): min survival=" + Fmt("%.3f", worst) +
                                           " >= 0.9");
  const double t = Seconds(start);
  out.Require(t < kSamplerSeconds, Fmt("%.2f s", t) + " < 30 s");
  return out;
}

Outcome Privacy() {
  Outcome out;
  ContributionMatrix::Builder b(1);
  const std::vector<int> counts = {1, 2, 3, 5, 10, 12};
  for (size_t i = 0; i < counts.size(); ++i)
    for (int u = 0; u < counts[i]; ++u)
      b.Add("u" + std::to_string(u), "c" + std::to_string(i), Stratum({0}), 1);
  const ContributionMatrix fixture = std::move(b).Build(WeightingConfig{});
  PrivacyConfig k5;
  k5.k = 5;
  const SuppressedMatrix s = Suppress(fixture, k5);
  bool exact = s.matrix.NumCells() == 3 && s.audit.total_suppressed == 3;
  for (size_t i = 0; i < counts.size(); ++i)
    exact = exact && (s.matrix.FindCell("c" + std::to_string(i), Stratum({0})) != nullptr) ==
                         (counts[i] >= 5);
  out.Require(exact, "6-cell fixture k=5: " + std::to_string(s.matrix.NumCells()) +
                         " survivors, exactly the cells with >= 5 contributors");

  // Cells sit far above the noise scale so the clamp at 0 never binds.
  ContributionMatrix::Builder many(1);
  for (int i = 0; i < kMadCells; ++i) many.Add("u", "c" + std::to_string(i), Stratum({0}), 1);
  const ContributionMatrix base =
      std::move(many).Build(WeightingConfig{}).WithWeights(
          [](const Stratum &, const std::string &, const ContributionMatrix::Cell &) {
            return 1000.0;
          });
  PrivacyConfig eps1;
  eps1.epsilon = 1.0;
  const double b_scale = eps1.SensitivityFor(WeightingConfig{});
  const ContributionMatrix noisy = AddDpNoise(base, eps1, 20210007);
  double mad = 0.0;
  for (const auto &[id, cell] : noisy.cells().at(Stratum({0}))) mad += std::fabs(cell.weight - 1000.0);
  mad /= kMadCells;
  out.Require(std::fabs(mad - b_scale) <= kMadTol * b_scale,
              "epsilon=1: MAD=" + Fmt("%.3f", mad) + " vs b=" + Fmt("%.3f", b_scale) + " within 5%");

  PrivacyConfig huge;
  huge.epsilon = 1e9;
  const ContributionMatrix quiet = AddDpNoise(fixture, huge, 20210008);
  double worst = 0.0;
  for (const auto &[h, classes] : fixture.cells())
    for (const auto &[id, cell] : classes)
      worst = std::max(worst, std::fabs(quiet.FindCell(id, h)->weight - cell.weight));
  out.Require(worst <= kEpsilonLimitTol,
              "epsilon=1e9: max|noise|=" + Fmt("%.3g", worst) + " <= 1e-3");
  return out;
}

int RunCli(const std::string &args) {
  const std::string cmd = std::string(FAIRREL_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> Tree(const fs::path &dir) {
  std::map<std::string, std::string> files;
  for (const auto &entry : fs::directory_iterator(dir))
    files[entry.path().filename().string()] = ReadTextFile(entry.path().string());
  return files;
}

Outcome Determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "fairrel_acceptance";
  fs::remove_all(root);
  const std::string a = (root / "run1").string(), b = (root / "run2").string(),
                    c = (root / "threads").string();
  const int rc = RunCli("end2end --seed 2021 --out-dir " + a) +
                 RunCli("end2end --seed 2021 --out-dir " + b) +
                 RunCli("end2end --seed 2021 --threads 8 --out-dir " + c);
  out.Require(rc == 0, "three end2end runs exit 0");
  if (rc != 0) return out;
  const auto ta = Tree(a), tb = Tree(b), tc = Tree(c);
  out.Require(ta == tb, "two invocations byte-identical (" + std::to_string(ta.size()) + " files)");
  out.Require(ta == tc, "1 thread vs 8 threads byte-identical");
  fs::remove_all(root);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"null-bias identity", NullBias},
      {"bias correction", BiasCorrection},
      {"ranking divergence", RankingDivergence},
      {"diversity boost", DiversityBoost},
      {"prior algebra", PriorAlgebra},
      {"utility algebra", UtilityAlgebra},
      {"sampler statistics", SamplerStatistics},
      {"privacy", Privacy},
      {"determinism", Determinism},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
