// fairrel/relevance.cc

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

#include "fairrel/relevance.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "fairrel/io.h"

namespace fairrel {

namespace {

ContributionMatrix AggregateChunk(std::span<const ContributionRecord> records,
                                  const DemographicSchema &schema,
                                  const WeightingConfig &weighting) {
  const size_t k = schema.NumCategories();
  ContributionMatrix::Builder builder(k);
  for (const ContributionRecord &r : records) {
    if (r.demographics.size() != k)
      throw Error(ErrorCode::kParse, "record arity does not match schema");
    for (size_t i = 0; i < k; ++i) {
      ValueId v = r.demographics[i];
      if (v == kUnspecified)
        throw Error(ErrorCode::kUnresolvedUnspecified,
                    "record of '" + r.contributor_id + "' has UNSPECIFIED " +
                        schema.category(i).name);
      if (v < 0 || static_cast<size_t>(v) >= schema.NumValues(i))
        throw Error(ErrorCode::kUnknownValue, "record value out of range");
    }
    if (r.item_count == 0) throw Error(ErrorCode::kNonPositiveCount, r.contributor_id);
    builder.Add(r.contributor_id, r.class_id, r.demographics, r.item_count);
  }
  return std::move(builder).Build(weighting);
}

}  // namespace

ContributionMatrix Aggregate(std::span<const ContributionRecord> records,
                             const DemographicSchema &schema, const WeightingConfig &weighting,
                             unsigned threads) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(records.size())));
  if (threads <= 1) return AggregateChunk(records, schema, weighting);

  std::vector<ContributionMatrix> partial(threads);
  std::vector<std::exception_ptr> failures(threads);
  std::vector<std::thread> workers;
  const size_t chunk = (records.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    size_t begin = std::min(records.size(), t * chunk);
    size_t end = std::min(records.size(), begin + chunk);
    workers.emplace_back([&, t, begin, end] {
      try {
        partial[t] = AggregateChunk(records.subspan(begin, end - begin), schema, weighting);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto &w : workers) w.join();
  for (auto &f : failures)
    if (f) std::rethrow_exception(f);
  ContributionMatrix merged = partial[0];
  for (unsigned t = 1; t < threads; ++t) merged = merged.Merge(partial[t]);
  return merged;
}

ConditionalTable Conditional(const ContributionMatrix &matrix) {
  ConditionalTable table;
  for (const auto &[stratum, classes] : matrix.cells()) {
    const double total = matrix.StratumTotal(stratum);
    if (!(total > 0.0)) continue;
    auto &row = table[stratum];
    for (const auto &[class_id, cell] : classes) row[class_id] = cell.weight / total;
  }
  return table;
}

std::map<Stratum, double> BoostFactors(const PopulationTable &pop,
                                       const DemographicSchema &schema,
                                       const BoostConfig &config,
                                       std::span<const Stratum> strata,
                                       const PseudoPopulations &pseudo) {
  std::map<Stratum, double> alphas;
  std::vector<std::pair<size_t, CategoryBoost>> boosted;
  for (const auto &[name, cb] : config.categories) {
    size_t cat = schema.CategoryIndex(name);
    if (cb.function == BoostFunction::kIdentity) continue;
    if (cb.level >= schema.NumLevels(cat))
      throw Error(ErrorCode::kInvalidBoost,
                  name + ": level " + std::to_string(cb.level) + " does not exist");
    boosted.emplace_back(cat, cb);
  }
  if (config.mode == BoostConfig::Mode::kJoint && boosted.size() > 1)
    throw Error(ErrorCode::kInvalidBoost,
                "joint mode boosts a single category; use independent mode for several");

  // Population of every ancestor node at the configured level.
  const size_t k = schema.NumCategories();
  std::vector<std::map<std::string, double>> pooled(boosted.size());
  for (size_t b = 0; b < boosted.size(); ++b) {
    const auto [cat, cb] = boosted[b];
    for (size_t v = 0; v < schema.NumValues(cat); ++v) {
      ValueId id = static_cast<ValueId>(v);
      double n;
      if (auto it = pseudo.find({cat, id}); it != pseudo.end()) {
        n = it->second;
      } else if (auto census = pop.Population(Stratum::AllWildcard(k).With(cat, id))) {
        n = static_cast<double>(*census);
      } else if (schema.IsUnavailable(cat, id)) {
        n = 0.0;
      } else {
        throw Error(ErrorCode::kMissingMarginal,
                    "boost needs population of " + schema.category(cat).name + "=" +
                        schema.ValueCode(cat, id));
      }
      pooled[b][schema.Ancestor(cat, id, cb.level)] += n;
    }
  }

  for (const Stratum &h : strata) {
    double alpha = 1.0;
    for (size_t b = 0; b < boosted.size(); ++b) {
      const auto [cat, cb] = boosted[b];
      const std::string &node = schema.Ancestor(cat, h[cat], cb.level);
      const double n = pooled[b].at(node);
      if (!(n > 0.0))
        throw Error(ErrorCode::kZeroPopulationAtBoostLevel,
                    schema.category(cat).name + " node '" + node + "'");
      alpha *= ApplyBoostFunction(cb.function, n) / n;
    }
    alphas[h] = alpha;
  }
  return alphas;
}

RelevanceScores Utility(const ConditionalTable &cond, const PriorVector &prior,
                        const std::map<Stratum, double> &alphas, const BoostConfig &boost) {
  RelevanceScores out;
  out.boost = boost;
  for (const auto &[stratum, row] : cond)
    for (const auto &[class_id, p] : row) out.raw_utility.emplace(class_id, 0.0);

  for (const auto &[stratum, entry] : prior.entries) {
    auto row = cond.find(stratum);
    if (row == cond.end()) continue;
    double alpha = 1.0;
    if (!alphas.empty()) {
      auto a = alphas.find(stratum);
      if (a == alphas.end())
        throw Error(ErrorCode::kInvalidBoost, "no boost factor for a scored stratum");
      alpha = a->second;
    }
    const double weight = alpha * entry.probability;
    for (const auto &[class_id, p] : row->second) out.raw_utility[class_id] += weight * p;
  }
  out.score = out.raw_utility;
  out.normalized = false;
  return out;
}

RelevanceScores Normalize(const RelevanceScores &scores) {
  double total = 0.0;
  for (const auto &[id, u] : scores.raw_utility) total += u;
  if (!(total > 0.0))
    throw Error(ErrorCode::kEmptyTable, "no relevance mass to normalize");
  RelevanceScores out = scores;
  for (auto &[id, s] : out.score) s = scores.raw_utility.at(id) / total;
  out.normalized = true;
  return out;
}

RelevanceScores UnstratifiedScores(const ContributionMatrix &matrix) {
  RelevanceScores raw;
  raw.raw_utility = matrix.ClassTotals();
  raw.score = raw.raw_utility;
  return Normalize(raw);
}

PriorVector EmpiricalPrior(const ContributionMatrix &matrix) {
  PriorVector prior;
  const double total = matrix.GrandTotal();
  for (const auto &[stratum, a] : matrix.stratum_totals())
    prior.entries.emplace(stratum, PriorEntry{total > 0.0 ? a / total : 0.0,
                                              PriorSource::kFallbackContributor});
  return prior;
}

ScoringResult ScorePipeline(std::vector<ContributionRecord> records, const PopulationTable &pop,
                            const DemographicSchema &schema, const ScoringOptions &options) {
  ScoringResult result;
  ResolvedRecords resolved = ResolveUnspecified(std::move(records), schema, options.policy);
  result.schema = resolved.schema;
  result.dropped_records = resolved.dropped;
  if (resolved.all_dropped)
    result.warnings.push_back("every record had a dropped UNSPECIFIED value");

  result.matrix = Aggregate(resolved.records, result.schema, options.weighting, options.threads);
  if (options.matrix_hook) result.matrix = options.matrix_hook(result.matrix);

  result.prior = CensusPrior(pop, result.schema, options.policy, &result.warnings);
  PseudoPopulations pseudo;
  if (options.policy.fallback) {
    result.prior = ApplyFallback(result.prior, result.matrix, result.schema);
    const double m_w = static_cast<double>(result.matrix.TotalContributors());
    for (size_t i = 0; i < result.schema.NumCategories(); ++i)
      for (size_t v = 0; v < result.schema.NumValues(i); ++v) {
        ValueId id = static_cast<ValueId>(v);
        if (!result.schema.IsUnavailable(i, id) || m_w <= 0.0) continue;
        pseudo[{i, id}] = static_cast<double>(result.matrix.ValueContributors(i, id)) / m_w *
                          static_cast<double>(pop.world_total());
      }
  }

  std::vector<Stratum> strata;
  for (const auto &[h, e] : result.prior.entries) strata.push_back(h);
  result.alphas = BoostFactors(pop, result.schema, options.boost, strata, pseudo);

  ConditionalTable cond = Conditional(result.matrix);
  result.stratified = Normalize(Utility(cond, result.prior, result.alphas, options.boost));
  result.unstratified = UnstratifiedScores(result.matrix);

  for (const auto &[h, e] : result.prior.entries) {
    if (cond.count(h))
      result.coverage.covered_prior_mass += e.probability;
    else
      result.coverage.prior_without_contributions.push_back(h);
  }
  for (const auto &[h, row] : cond)
    if (!(result.prior.At(h) > 0.0)) result.coverage.contributions_without_prior.push_back(h);
  for (const Stratum &h : result.coverage.contributions_without_prior)
    result.warnings.push_back("contributions from " + result.schema.EncodeStratum(h) +
                              " have zero prior and do not affect scores");
  return result;
}

std::string FormatScores(const RelevanceScores &scores) {
  std::ostringstream os;
  os << "class_id,score,raw_utility\n";
  for (const auto &[id, s] : scores.Ranked())
    os << CsvEscape(id) << "," << FormatReal(s) << "," << FormatReal(scores.raw_utility.at(id))
       << "\n";
  return os.str();
}

RelevanceScores ParseScores(std::istream &in) {
  CsvTable table = ReadCsv(in);
  const int id = table.Column("class_id"), sc = table.Column("score"),
            raw = table.Column("raw_utility");
  if (id < 0 || sc < 0) throw Error(ErrorCode::kMissingColumn, "scores need class_id,score");
  RelevanceScores out;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    if (row.size() != table.header.size())
      throw Error(ErrorCode::kMalformedRow, "scores line " + std::to_string(table.line_numbers[r]));
    double s = 0.0, u = 0.0;
    try {
      s = std::stod(row[sc]);
      u = raw >= 0 ? std::stod(row[raw]) : s;
    } catch (const std::exception &) {
      throw Error(ErrorCode::kMalformedRow,
                  "scores line " + std::to_string(table.line_numbers[r]) + ": not a number");
    }
    if (!(s >= 0.0)) throw Error(ErrorCode::kMalformedRow, "negative score for " + row[id]);
    if (!out.score.emplace(row[id], s).second)
      throw Error(ErrorCode::kDuplicateValue, "class '" + row[id] + "' listed twice");
    out.raw_utility.emplace(row[id], u);
  }
  out.normalized = std::fabs(out.Sum() - 1.0) <= 1e-9;
  return out;
}

RelevanceScores LoadScores(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return ParseScores(in);
}

}  // namespace fairrel
