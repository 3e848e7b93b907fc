// fairrel/tools/fairrel.cc

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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fairrel/config.h"
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
using nlohmann::json;

namespace fairrel {
namespace {

const std::vector<size_t> kDefaultGrid = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};

// Options shared by every subcommand: input paths, the config file and one
// string slot per static config key.
struct Invocation {
  std::string name;
  CLI::App *app = nullptr;
  std::string config_path;
  std::string out_dir = ".";
  std::map<std::string, std::string> paths;  // role -> path
  std::map<std::string, std::string> key_flags;
  std::map<std::string, CLI::Option *> key_options;
  std::vector<std::string> strata;
  bool unstratified = false;
};

void AddPath(Invocation *inv, const std::string &role, const std::string &help) {
  inv->app->add_option("--" + role, inv->paths[role], help);
}

void AddConfigKeys(Invocation *inv) {
  for (const auto &[key, help] : Config::StaticKeys()) {
    std::string names = "--" + Config::FlagForKey(key);
    if (key == "sampler.budget") names += ",--budget";
    inv->key_options[key] = inv->app->add_option(names, inv->key_flags[key], help);
  }
  inv->app->allow_extras();
  inv->app->footer(
      "Per-category keys are also accepted as flags: --boost-<category> <f>, "
      "--boost-<category>-level <level>, --priors-unspecified-<category> drop|own-group.");
}

// Config file first, then flags on top.
Config EffectiveConfig(const Invocation &inv) {
  Config config;
  if (!inv.config_path.empty()) config = Config::Load(inv.config_path);
  Config flags;
  for (const auto &[key, opt] : inv.key_options)
    if (opt->count() > 0) flags.Set(key, inv.key_flags.at(key));
  const std::vector<std::string> extras = inv.app->remaining();
  for (size_t i = 0; i < extras.size(); ++i) {
    const std::string &token = extras[i];
    if (token.rfind("--", 0) != 0)
      throw Error(ErrorCode::kInvalidConfig, "unexpected argument '" + token + "'");
    std::string body = token.substr(2), value;
    if (auto eq = body.find('='); eq != std::string::npos) {
      value = body.substr(eq + 1);
      body.erase(eq);
    } else if (i + 1 < extras.size()) {
      value = extras[++i];
    } else {
      throw Error(ErrorCode::kInvalidConfig, "flag '" + token + "' needs a value");
    }
    auto key = Config::KeyForFlag(body);
    if (!key) throw Error(ErrorCode::kInvalidConfig, "unknown flag '" + token + "'");
    flags.Set(*key, value);
  }
  config.Merge(flags);
  return config;
}

const std::string &RequirePath(const Invocation &inv, const std::string &role) {
  const std::string &path = inv.paths.at(role);
  if (path.empty()) throw Error(ErrorCode::kInvalidConfig, "--" + role + " is required");
  return path;
}

bool HasPath(const Invocation &inv, const std::string &role) {
  auto it = inv.paths.find(role);
  return it != inv.paths.end() && !it->second.empty();
}

std::uint64_t RequireSeed(const Config &config, const std::string &why) {
  if (!config.Has("seed"))
    throw Error(ErrorCode::kInvalidConfig, "--seed is required (" + why + ")");
  return config.GetCount("seed", 0);
}

unsigned Threads(const Config &config) {
  std::uint64_t t = config.GetCount("threads", 1);
  if (t < 1) throw Error(ErrorCode::kInvalidConfig, "threads must be >= 1");
  return static_cast<unsigned>(t);
}

void Warn(const std::string &message) { std::cerr << "warning: " << message << "\n"; }

// Collects outputs and writes the run manifest next to them.
class Run {
 public:
  Run(const Invocation &inv, const Config &config) : inv_(inv), config_(config) {
    std::error_code ec;
    fs::create_directories(inv.out_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create '" + inv.out_dir + "': " + ec.message());
  }

  void Input(const std::string &role, const std::string &path) {
    inputs_[role] = {{"file", fs::path(path).filename().string()}, {"sha256", FileSha256(path)}};
  }

  void Output(const std::string &name, const std::string &content) {
    WriteTextFile((fs::path(inv_.out_dir) / name).string(), content);
    outputs_[name] = Sha256Hex(content);
  }

  std::string Path(const std::string &name) const {
    return (fs::path(inv_.out_dir) / name).string();
  }

  void Finish() {
    json manifest;
    manifest["command"] = inv_.name;
    manifest["version"] = FAIRREL_VERSION;
    manifest["rng"] = Rng::kAlgorithm;
    json config = json::object();
    for (const auto &[key, value] : config_.values())
      if (key != "threads") config[key] = value;
    manifest["config"] = config;
    manifest["seed"] = config_.Has("seed") ? json(config_.GetCount("seed", 0)) : json(nullptr);
    manifest["inputs"] = inputs_;
    manifest["outputs"] = outputs_;
    WriteTextFile(Path("manifest.json"), manifest.dump(2) + "\n");
  }

 private:
  const Invocation &inv_;
  const Config &config_;
  json inputs_ = json::object();
  json outputs_ = json::object();
};

std::string IngestJson(const IngestReport &r) {
  json j;
  j["rows_read"] = r.rows_read;
  j["rows_accepted"] = r.rows_accepted;
  j["rows_rejected"] = r.rows_rejected;
  j["records"] = r.records;
  j["rejected_by_reason"] = r.rejected_by_reason;
  j["distinct_contributors"] = r.distinct_contributors;
  j["distinct_classes"] = r.distinct_classes;
  return j.dump(2) + "\n";
}

std::vector<ContributionRecord> LoadRecords(const Invocation &inv, const Config &config,
                                            const DemographicSchema &schema, Run *run,
                                            IngestReport *report) {
  const std::string &path = RequirePath(inv, "contributions");
  IngestOptions options;
  options.strict = config.GetBool("ingest.strict", false);
  auto records = LoadContributions(path, schema, report, options);
  run->Input("contributions", path);
  if (report->rows_rejected > 0)
    Warn(std::to_string(report->rows_rejected) + " contribution rows rejected");
  return records;
}

DemographicSchema LoadSchemaInput(const Invocation &inv, Run *run) {
  const std::string &path = RequirePath(inv, "schema");
  DemographicSchema schema = LoadSchema(path);
  run->Input("schema", path);
  return schema;
}

std::function<ContributionMatrix(const ContributionMatrix &)> ScoreScopeHook(
    const Config &config) {
  const PrivacyConfig privacy = PrivacyFromConfig(config);
  const bool suppress = privacy.suppress_scope == PrivacyConfig::Scope::kScores;
  const bool noise = privacy.epsilon && privacy.noise_scope == PrivacyConfig::Scope::kScores;
  if (!suppress && !noise) return nullptr;
  std::uint64_t seed = noise ? RequireSeed(config, "noise on scoring inputs") : 0;
  return [privacy, suppress, noise, seed](const ContributionMatrix &m) {
    ContributionMatrix out = suppress ? Suppress(m, privacy).matrix : m;
    if (noise) out = AddDpNoise(out, privacy, DeriveSeed(seed, 1));
    return out;
  };
}

std::string CoverageJson(const CoverageReport &coverage, const DemographicSchema &schema) {
  json j;
  j["covered_prior_mass"] = coverage.covered_prior_mass;
  j["prior_without_contributions"] = json::array();
  for (const auto &s : coverage.prior_without_contributions)
    j["prior_without_contributions"].push_back(schema.EncodeStratum(s));
  j["contributions_without_prior"] = json::array();
  for (const auto &s : coverage.contributions_without_prior)
    j["contributions_without_prior"].push_back(schema.EncodeStratum(s));
  return j.dump(2) + "\n";
}

ScoringOptions MakeScoringOptions(const Config &config, const DemographicSchema &schema) {
  ScoringOptions options;
  options.policy = PolicyFromConfig(config, schema);
  options.weighting = WeightingFromConfig(config);
  options.boost = BoostFromConfig(config, schema);
  options.threads = Threads(config);
  options.matrix_hook = ScoreScopeHook(config);
  return options;
}

void ReportWarnings(const std::vector<std::string> &warnings) {
  for (const auto &w : warnings) Warn(w);
}

// ---------------------------------------------------------------------------

void CmdAggregate(const Invocation &inv) {
  const Config config = EffectiveConfig(inv);
  Run run(inv, config);
  const DemographicSchema schema = LoadSchemaInput(inv, &run);
  IngestReport ingest;
  auto records = LoadRecords(inv, config, schema, &run, &ingest);
  const PriorPolicy policy = PolicyFromConfig(config, schema);
  ResolvedRecords resolved = ResolveUnspecified(std::move(records), schema, policy);
  if (resolved.dropped > 0)
    Warn(std::to_string(resolved.dropped) + " records with unspecified values dropped");
  const ContributionMatrix matrix = Aggregate(resolved.records, resolved.schema,
                                              WeightingFromConfig(config), Threads(config));
  const PrivacyConfig privacy = PrivacyFromConfig(config);
  SuppressedMatrix published = Suppress(matrix, privacy);
  if (privacy.epsilon)
    published.matrix = AddDpNoise(published.matrix, privacy,
                                  DeriveSeed(RequireSeed(config, "privacy.epsilon is set"), 0));
  run.Output("matrix.csv", FormatMatrix(published.matrix, resolved.schema));
  run.Output("suppression_audit.csv", FormatAudit(published.audit, resolved.schema));
  run.Output("ingest.json", IngestJson(ingest));
  run.Finish();
}

void CmdPriors(const Invocation &inv) {
  const Config config = EffectiveConfig(inv);
  Run run(inv, config);
  const DemographicSchema schema = LoadSchemaInput(inv, &run);
  const std::string &pop_path = RequirePath(inv, "population");
  const PopulationTable pop = LoadPopulation(pop_path, schema);
  run.Input("population", pop_path);
  const PriorPolicy policy = PolicyFromConfig(config, schema);
  std::vector<std::string> warnings;

  DemographicSchema effective = schema;
  std::optional<ContributionMatrix> matrix;
  if (HasPath(inv, "contributions")) {
    IngestReport ingest;
    auto records = LoadRecords(inv, config, schema, &run, &ingest);
    ResolvedRecords resolved = ResolveUnspecified(std::move(records), schema, policy);
    effective = resolved.schema;
    matrix = Aggregate(resolved.records, effective, WeightingFromConfig(config), Threads(config));
  }
  PriorVector prior = CensusPrior(pop, schema, policy, &warnings);
  bool needs_fallback = false;
  for (size_t i = 0; i < effective.NumCategories(); ++i)
    needs_fallback |= effective.HasUnavailable(i);
  if (needs_fallback && policy.fallback) {
    if (!matrix)
      throw Error(ErrorCode::kNoContributors,
                  "population-unavailable values need --contributions for the fallback prior");
    prior = ApplyFallback(prior, *matrix, effective);
  }
  ReportWarnings(warnings);
  run.Output("priors.csv", FormatPriors(prior, effective));
  run.Finish();
}

void CmdScore(const Invocation &inv) {
  const Config config = EffectiveConfig(inv);
  Run run(inv, config);
  const DemographicSchema schema = LoadSchemaInput(inv, &run);
  const ScoringOptions options = MakeScoringOptions(config, schema);
  if (inv.unstratified && !options.boost.IsIdentity())
    throw Error(ErrorCode::kConflictingOptions,
                "--unstratified cannot be combined with a diversity boost");
  IngestReport ingest;
  auto records = LoadRecords(inv, config, schema, &run, &ingest);
  const std::string &pop_path = RequirePath(inv, "population");
  const PopulationTable pop = LoadPopulation(pop_path, schema);
  run.Input("population", pop_path);

  ScoringResult result = ScorePipeline(std::move(records), pop, schema, options);
  ReportWarnings(result.warnings);
  if (result.dropped_records > 0)
    Warn(std::to_string(result.dropped_records) + " records with unspecified values dropped");
  run.Output("scores.csv",
             FormatScores(inv.unstratified ? result.unstratified : result.stratified));
  run.Output("unstratified_scores.csv", FormatScores(result.unstratified));
  run.Output("priors.csv", FormatPriors(result.prior, result.schema));
  run.Output("coverage.json", CoverageJson(result.coverage, result.schema));
  run.Output("ingest.json", IngestJson(ingest));
  run.Finish();
}

std::string AllocationSummary(const AllocationReport &report) {
  json j;
  j["median_score"] = report.median_score;
  j["long_tail_classes"] = report.long_tail_classes;
  j["long_tail_sampled"] = report.long_tail_sampled;
  return j.dump(2) + "\n";
}

void WriteAllocation(Run *run, const RelevanceScores &scores, const Config &config,
                     std::uint64_t seed) {
  if (!config.Has("sampler.budget"))
    throw Error(ErrorCode::kInvalidConfig, "--budget (sampler.budget) is required");
  const std::uint64_t budget = config.GetCount("sampler.budget", 0);
  SamplingMode mode;
  try {
    mode = ParseSamplingMode(config.GetString("sampler.mode", "multinomial"));
  } catch (const Error &) {
    throw Error(ErrorCode::kInvalidConfig, "sampler.mode must be multinomial or poisson");
  }
  const SampleAllocation alloc = Allocate(scores, budget, seed, mode);
  const AllocationReport report = MakeAllocationReport(alloc, scores);
  run->Output("allocation.csv", FormatAllocation(report));
  run->Output("allocation.json", FormatAllocationMetadata(alloc));
  run->Output("allocation_summary.json", AllocationSummary(report));
}

void CmdSample(const Invocation &inv) {
  const Config config = EffectiveConfig(inv);
  const std::uint64_t seed = RequireSeed(config, "sampling is randomized");
  Run run(inv, config);
  const std::string &path = RequirePath(inv, "scores");
  const RelevanceScores scores = LoadScores(path);
  run.Input("scores", path);
  WriteAllocation(&run, scores, config, seed);
  run.Finish();
}

// Report files for one score map.  `tag` distinguishes several score maps
// written into the same directory.
struct ReportSettings {
  size_t n = 10;
  size_t k = 10;
  std::vector<size_t> grid;
  RegionLevel level = RegionLevel::kContinent;
  BoostConfig boost;
};

ReportSettings MakeReportSettings(const Config &config) {
  ReportSettings s;
  s.n = config.GetCount("report.n", 10);
  s.k = config.GetCount("report.k", 10);
  s.grid = config.GetCountList("report.grid", kDefaultGrid);
  try {
    s.level = ParseRegionLevel(config.GetString("report.level", "continent"));
  } catch (const Error &) {
    throw Error(ErrorCode::kInvalidConfig, "report.level must be country or continent");
  }
  return s;
}

void WriteScoreReports(Run *run, const std::string &tag, const RelevanceScores &scores,
                       const ClassMetadata *meta, const ReportSettings &s) {
  const std::string prefix = tag.empty() ? "" : tag + "_";
  const std::string n_param = "N" + std::to_string(s.n);
  run->Output(ReportFileName(prefix + "top_n", n_param, s.boost),
              FormatRanking(TopN(scores, s.n)));
  if (!meta) return;
  DiversityCurve curve = ComputeDiversityCurve(scores, *meta, s.grid);
  if (curve.unknown_seen) Warn(tag + " diversity curve: classes without metadata under UNKNOWN");
  run->Output(ReportFileName(prefix + "diversity_curve", "", s.boost),
              FormatDiversityCurve(curve));
  RegionBreakdown breakdown = ComputeRegionBreakdown(scores, *meta, s.n, s.level);
  if (breakdown.unknown_seen) Warn(tag + " region breakdown: classes without metadata");
  run->Output(ReportFileName(prefix + "region_" + RegionLevelName(s.level), n_param, s.boost),
              FormatRegionBreakdown(breakdown));
}

std::string StratumParam(const std::string &text) {
  std::string out;
  for (char ch : text) {
    if (ch == '=') out += '_';
    else if (ch == '|') out += '+';
    else if (ch == '*') out += "all";
    else out += ch;
  }
  return out;
}

void CmdReport(const Invocation &inv) {
  const Config config = EffectiveConfig(inv);
  Run run(inv, config);
  ReportSettings settings = MakeReportSettings(config);

  std::optional<DemographicSchema> schema;
  if (HasPath(inv, "schema")) schema = LoadSchemaInput(inv, &run);
  bool boosted = false;
  for (const auto &[key, value] : config.values())
    boosted |= key.rfind("boost.", 0) == 0 && key != "boost.mode";
  if (boosted) {
    if (!schema) throw Error(ErrorCode::kInvalidConfig, "boost keys need --schema");
    settings.boost = BoostFromConfig(config, *schema);
  }

  std::optional<ContributionMatrix> matrix;
  std::optional<DemographicSchema> resolved_schema;
  if (HasPath(inv, "contributions")) {
    if (!schema) throw Error(ErrorCode::kInvalidConfig, "--contributions needs --schema");
    IngestReport ingest;
    auto records = LoadRecords(inv, config, *schema, &run, &ingest);
    ResolvedRecords resolved =
        ResolveUnspecified(std::move(records), *schema, PolicyFromConfig(config, *schema));
    resolved_schema = resolved.schema;
    matrix = Aggregate(resolved.records, resolved.schema, WeightingFromConfig(config),
                       Threads(config));
  }

  const std::string order = config.GetString("report.order", "relevance");
  RelevanceScores scores;
  if (order == "relevance") {
    const std::string &path = RequirePath(inv, "scores");
    scores = LoadScores(path);
    run.Input("scores", path);
  } else if (order == "contributions") {
    if (!matrix)
      throw Error(ErrorCode::kInvalidConfig, "report.order = contributions needs --contributions");
    scores = UnstratifiedScores(*matrix);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "report.order must be relevance or contributions");
  }

  std::optional<ClassMetadata> meta;
  if (HasPath(inv, "classes")) {
    meta = LoadClassMetadata(inv.paths.at("classes"), schema ? &*schema : nullptr);
    run.Input("classes", inv.paths.at("classes"));
    if (meta->rejected > 0)
      Warn(std::to_string(meta->rejected) + " class metadata rows rejected");
  }
  WriteScoreReports(&run, "", scores, meta ? &*meta : nullptr, settings);

  if (HasPath(inv, "baseline")) {
    const RelevanceScores baseline = LoadScores(inv.paths.at("baseline"));
    run.Input("baseline", inv.paths.at("baseline"));
    OverlapResult overlap = OverlapAtK(scores, baseline, settings.k);
    if (overlap.truncated) Warn("overlap@K truncated to " + std::to_string(overlap.k_used));
    run.Output(ReportFileName("overlap", "K" + std::to_string(settings.k), settings.boost),
               FormatOverlap(overlap));
  }

  if (!inv.strata.empty()) {
    if (!matrix)
      throw Error(ErrorCode::kInvalidConfig, "--stratum needs --schema and --contributions");
    const SuppressedMatrix published = Suppress(*matrix, PrivacyFromConfig(config));
    for (const auto &text : inv.strata) {
      const Stratum pattern = resolved_schema->DecodeStratum(text);
      StratumRanking ranking = PerStratumRanking(published.matrix, pattern, settings.n);
      if (!ranking.matched) Warn("stratum '" + text + "' matches no published stratum");
      run.Output(ReportFileName("per_stratum-" + StratumParam(text),
                                "N" + std::to_string(settings.n), settings.boost),
                 FormatRanking(ranking.ranking));
    }
    run.Output("suppression_audit.csv", FormatAudit(published.audit, *resolved_schema));
  }
  run.Finish();
}

Scenario ScenarioInput(const Invocation &inv, const Config &config, Run *run) {
  Scenario scenario = DefaultScenario();
  if (HasPath(inv, "scenario")) {
    scenario = LoadScenario(inv.paths.at("scenario"));
    run->Input("scenario", inv.paths.at("scenario"));
  }
  scenario.seed = RequireSeed(config, "simulation is randomized");
  scenario.Validate();
  return scenario;
}

void WriteWorld(Run *run, const Scenario &scenario, const SimulatedWorld &world) {
  run->Output("scenario.txt", FormatScenario(scenario));
  run->Output("schema.txt", FormatSchema(world.schema));
  run->Output("contributions.csv", FormatContributions(world.records, world.schema));
  run->Output("population.csv", FormatPopulation(world.population, world.schema));
  run->Output("classes.csv", FormatClassMetadata(world.classes));
  run->Output("truth.csv", FormatScores(TrueRelevance(scenario)));
}

void CmdSimulate(const Invocation &inv) {
  const Config config = EffectiveConfig(inv);
  Run run(inv, config);
  const Scenario scenario = ScenarioInput(inv, config, &run);
  WriteWorld(&run, scenario, Generate(scenario, Threads(config)));
  run.Finish();
}

json MetricsJson(const EvaluationMetrics &m) {
  json j;
  j["l1"] = m.l1;
  j["max_abs"] = m.max_abs;
  j["overlap_at_k"] = m.overlap_at_k;
  j["pairwise_agreement"] = m.pairwise_agreement;
  return j;
}

double RegionL1(const RegionBreakdown &a, const std::map<std::string, double> &b) {
  std::map<std::string, double> diff = b;
  for (auto &[region, share] : diff) share = -share;
  for (const auto &[region, share] : a.shares) diff[region] += share;
  double l1 = 0.0;
  for (const auto &[region, d] : diff) l1 += std::fabs(d);
  return l1;
}

void CmdEnd2End(const Invocation &inv) {
  Config config = EffectiveConfig(inv);
  Run run(inv, config);
  const Scenario scenario = ScenarioInput(inv, config, &run);
  WriteWorld(&run, scenario, Generate(scenario, Threads(config)));

  // Score from the files just written so serialization is on the path.
  const DemographicSchema schema = LoadSchema(run.Path("schema.txt"));
  IngestReport ingest;
  auto records = LoadContributions(run.Path("contributions.csv"), schema, &ingest,
                                   IngestOptions{true});
  const PopulationTable pop = LoadPopulation(run.Path("population.csv"), schema);
  const ClassMetadata meta = LoadClassMetadata(run.Path("classes.csv"), &schema);
  const RelevanceScores truth = LoadScores(run.Path("truth.csv"));

  ScoringOptions options = MakeScoringOptions(config, schema);
  if (!config.Has("relevance.weighting")) options.weighting = scenario.weighting;
  ScoringResult result = ScorePipeline(std::move(records), pop, schema, options);
  ReportWarnings(result.warnings);
  run.Output("scores.csv", FormatScores(result.stratified));
  run.Output("unstratified_scores.csv", FormatScores(result.unstratified));
  run.Output("priors.csv", FormatPriors(result.prior, result.schema));

  ReportSettings settings = MakeReportSettings(config);
  settings.boost = options.boost;
  const EvaluationMetrics strat = Evaluate(result.stratified, truth, settings.k);
  const EvaluationMetrics unstrat = Evaluate(result.unstratified, truth, settings.k);
  const OverlapResult overlap = OverlapAtK(result.stratified, result.unstratified, settings.k);

  std::map<std::string, double> region_truth;
  const size_t geo = 0;
  for (const auto &[stratum, n] : pop.entries()) {
    if (!stratum.IsFull()) continue;
    const size_t level = settings.level == RegionLevel::kContinent ? 1 : 0;
    region_truth[schema.Ancestor(geo, stratum[geo], level)] +=
        static_cast<double>(n) / static_cast<double>(pop.world_total());
  }
  const RegionBreakdown strat_regions =
      ComputeRegionBreakdown(result.stratified, meta, settings.n, settings.level);
  const RegionBreakdown unstrat_regions =
      ComputeRegionBreakdown(result.unstratified, meta, settings.n, settings.level);

  json metrics;
  metrics["k"] = settings.k;
  metrics["stratified"] = MetricsJson(strat);
  metrics["unstratified"] = MetricsJson(unstrat);
  metrics["overlap_stratified_unstratified"] = overlap.value;
  metrics["weighting"] = options.weighting.Describe();
  metrics["region"] = {{"level", RegionLevelName(settings.level)},
                       {"n", settings.n},
                       {"population_shares", region_truth},
                       {"stratified_l1", RegionL1(strat_regions, region_truth)},
                       {"unstratified_l1", RegionL1(unstrat_regions, region_truth)}};
  run.Output("metrics.json", metrics.dump(2) + "\n");

  WriteScoreReports(&run, "stratified", result.stratified, &meta, settings);
  WriteScoreReports(&run, "unstratified", result.unstratified, &meta, settings);
  run.Output(ReportFileName("overlap", "K" + std::to_string(settings.k), settings.boost),
             FormatOverlap(overlap));

  if (!config.Has("sampler.budget")) config.Set("sampler.budget", "1000");
  WriteAllocation(&run, result.stratified, config, DeriveSeed(scenario.seed, 0x5a));
  run.Finish();
}

int ExitCodeFor(const Error &e) { return e.code() == ErrorCode::kIo ? 2 : 1; }

}  // namespace
}  // namespace fairrel

int main(int argc, char **argv) {
  using namespace fairrel;
  CLI::App app{"fairrel: bias-corrected relevance scores from crowdsourced contributions"};
  app.set_version_flag("--version", FAIRREL_VERSION);
  app.require_subcommand(1);

  struct Spec {
    const char *name;
    const char *help;
    std::vector<std::pair<const char *, const char *>> paths;
    void (*run)(const Invocation &);
  };
  const std::vector<Spec> specs = {
      {"aggregate", "build the suppressed contribution matrix",
       {{"schema", "demographic schema file"}, {"contributions", "contribution log CSV"}},
       CmdAggregate},
      {"priors", "compute the stratum prior from population tables",
       {{"schema", "demographic schema file"},
        {"population", "population table CSV"},
        {"contributions", "contribution log CSV (for fallback priors)"}},
       CmdPriors},
      {"score", "compute stratified relevance scores",
       {{"schema", "demographic schema file"},
        {"contributions", "contribution log CSV"},
        {"population", "population table CSV"}},
       CmdScore},
      {"sample", "allocate an evaluation sample budget",
       {{"scores", "normalized scores CSV"}},
       CmdSample},
      {"report", "ranking, overlap, diversity and region reports",
       {{"scores", "scores CSV"},
        {"baseline", "second scores CSV for overlap@K"},
        {"classes", "class metadata CSV"},
        {"schema", "demographic schema file"},
        {"contributions", "contribution log CSV (per-stratum rankings)"}},
       CmdReport},
      {"simulate", "generate a synthetic biased world",
       {{"scenario", "scenario file (default scenario when omitted)"}},
       CmdSimulate},
      {"end2end", "simulate, score and evaluate against the ground truth",
       {{"scenario", "scenario file (default scenario when omitted)"}},
       CmdEnd2End},
  };

  std::vector<std::unique_ptr<Invocation>> invocations;
  for (const auto &spec : specs) {
    auto inv = std::make_unique<Invocation>();
    inv->name = spec.name;
    inv->app = app.add_subcommand(spec.name, spec.help);
    inv->app->add_option("--config", inv->config_path, "key = value config file");
    inv->app->add_option("--out-dir", inv->out_dir, "output directory")->capture_default_str();
    for (const auto &[role, help] : spec.paths) AddPath(inv.get(), role, help);
    if (inv->name == "score")
      inv->app->add_flag("--unstratified", inv->unstratified,
                         "write contribution-share scores to scores.csv");
    if (inv->name == "report")
      inv->app->add_option("--stratum", inv->strata,
                           "per-stratum ranking for a pattern such as country=CA|gender=*");
    AddConfigKeys(inv.get());
    invocations.push_back(std::move(inv));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (size_t i = 0; i < specs.size(); ++i) {
    if (!invocations[i]->app->parsed()) continue;
    try {
      specs[i].run(*invocations[i]);
      return 0;
    } catch (const Error &e) {
      std::cerr << "error: " << e.what() << "\n";
      return ExitCodeFor(e);
    } catch (const std::filesystem::filesystem_error &e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception &e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
