// fairrel/priors.h

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

#ifndef FAIRREL_PRIORS_H_
#define FAIRREL_PRIORS_H_

#include <map>
#include <string>
#include <vector>

#include "fairrel/core.h"

namespace fairrel {

enum class UnspecifiedPolicy { kDrop, kOwnGroup };

struct PriorPolicy {
  enum class Join { kJointIfAvailable, kProductOfMarginals, kConditional };
  Join join = Join::kJointIfAvailable;
  // Category the other categories are conditioned on, for kConditional.
  std::string conditional_on;
  // Per category name; categories not listed use kDrop.
  std::map<std::string, UnspecifiedPolicy> unspecified;
  bool fallback = true;

  UnspecifiedPolicy UnspecifiedFor(const std::string &category) const;
  std::string Describe() const;
};

// Prior over full strata of population-available values.
//
// kJointIfAvailable uses N_h for every full stratum with a census row and
// falls back to N_W * prod_i (N_{h_i} / N_W) for the rest, then normalizes
// over the covered strata.  kProductOfMarginals multiplies per-category
// shares.  kConditional multiplies P(x) by P(h_i | x) for every other
// category i, where x is the value of the conditioning category; when the
// two-way rows for some x are missing the global share is used for that x
// and a warning is appended to `warnings`.
PriorVector CensusPrior(const PopulationTable &pop, const DemographicSchema &schema,
                        const PriorPolicy &policy,
                        std::vector<std::string> *warnings = nullptr);

// Extends `prior` to strata holding population-unavailable values.  Each
// unavailable value a gets M_a / M_W (distinct contributors); the census mass
// of its category is scaled by 1 - sum_a M_a / M_W.  Categories combine by
// independence.  Returns `prior` unchanged when no category has unavailable
// values or when the fallback was already applied.
PriorVector ApplyFallback(const PriorVector &prior, const ContributionMatrix &matrix,
                          const DemographicSchema &schema);

struct ResolvedRecords {
  std::vector<ContributionRecord> records;
  // Input schema plus one synthetic, population-unavailable value
  // "__UNSPEC_<category>" for every own-group category.
  DemographicSchema schema;
  size_t dropped = 0;
  bool all_dropped = false;
};

std::string SyntheticUnspecifiedCode(const std::string &category);

ResolvedRecords ResolveUnspecified(std::vector<ContributionRecord> records,
                                   const DemographicSchema &schema, const PriorPolicy &policy);

// stratum,probability,provenance with 17 significant digits.
std::string FormatPriors(const PriorVector &prior, const DemographicSchema &schema);

}  // namespace fairrel

#endif  // FAIRREL_PRIORS_H_
