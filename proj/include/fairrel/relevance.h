// fairrel/relevance.h

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

#ifndef FAIRREL_RELEVANCE_H_
#define FAIRREL_RELEVANCE_H_

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairrel/core.h"
#include "fairrel/priors.h"

namespace fairrel {

// Builds A_{c,h}.  Records are split into `threads` chunks whose partial
// matrices are merged; because merging sums integer tallies and weights are
// recomputed in canonical order, the result does not depend on `threads`.
ContributionMatrix Aggregate(std::span<const ContributionRecord> records,
                             const DemographicSchema &schema, const WeightingConfig &weighting,
                             unsigned threads = 1);

// P(c|h) = A_{c,h} / A_h for every stratum with A_h > 0.
using ConditionalTable = std::map<Stratum, std::map<std::string, double>>;
ConditionalTable Conditional(const ContributionMatrix &matrix);

// Populations for values without census rows (fallback pseudo-populations).
using PseudoPopulations = std::map<std::pair<size_t, ValueId>, double>;

// alpha_h for each of `strata`.  In joint mode exactly one category may carry
// a non-identity function and alpha_h = f(N_x) / N_x, x being the ancestor of
// h's value at the configured level.  In independent mode alpha_h is the
// product of those factors over all boosted categories.
std::map<Stratum, double> BoostFactors(const PopulationTable &pop,
                                       const DemographicSchema &schema,
                                       const BoostConfig &config,
                                       std::span<const Stratum> strata,
                                       const PseudoPopulations &pseudo = {});

// U(c) = sum_h alpha_h P(c|h) P(h), summed in canonical stratum order.
// An empty `alphas` means alpha = 1 everywhere.  Result is raw.
RelevanceScores Utility(const ConditionalTable &cond, const PriorVector &prior,
                        const std::map<Stratum, double> &alphas, const BoostConfig &boost = {});

RelevanceScores Normalize(const RelevanceScores &scores);

// A_c / sum A: what naive crowdsourcing would report.
RelevanceScores UnstratifiedScores(const ContributionMatrix &matrix);
// P(h) = A_h / sum A.
PriorVector EmpiricalPrior(const ContributionMatrix &matrix);

struct ScoringOptions {
  PriorPolicy policy;
  WeightingConfig weighting;
  BoostConfig boost;
  unsigned threads = 1;
  // Applied to the aggregated matrix before scoring (e.g. opt-in privacy).
  std::function<ContributionMatrix(const ContributionMatrix &)> matrix_hook;
};

struct CoverageReport {
  std::vector<Stratum> prior_without_contributions;
  std::vector<Stratum> contributions_without_prior;  // prior absent or zero
  double covered_prior_mass = 0.0;                    // sum of P(h) with A_h > 0
};

struct ScoringResult {
  DemographicSchema schema;  // input schema plus synthetic unspecified values
  ContributionMatrix matrix;
  PriorVector prior;
  std::map<Stratum, double> alphas;
  RelevanceScores stratified;    // normalized
  RelevanceScores unstratified;  // normalized
  CoverageReport coverage;
  size_t dropped_records = 0;
  std::vector<std::string> warnings;
};

ScoringResult ScorePipeline(std::vector<ContributionRecord> records, const PopulationTable &pop,
                            const DemographicSchema &schema, const ScoringOptions &options);

// class_id,score,raw_utility in canonical order, 17 significant digits.
std::string FormatScores(const RelevanceScores &scores);
RelevanceScores ParseScores(std::istream &in);
RelevanceScores LoadScores(const std::string &path);

}  // namespace fairrel

#endif  // FAIRREL_RELEVANCE_H_
