// fairrel/reports.h

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

#ifndef FAIRREL_REPORTS_H_
#define FAIRREL_REPORTS_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fairrel/core.h"

namespace fairrel {

using Ranking = std::vector<std::pair<std::string, double>>;

inline constexpr const char *kUnknownRegion = "UNKNOWN";

// First min(n, #classes) entries in canonical order.
Ranking TopN(const RelevanceScores &scores, size_t n);

struct OverlapResult {
  double value = 0.0;
  size_t k_used = 0;
  // k exceeded one of the class sets; computed over the smaller size.
  bool truncated = false;
};

// |topK(a) ∩ topK(b)| / K.  Throws kInvalidConfig for k == 0.
OverlapResult OverlapAtK(const RelevanceScores &a, const RelevanceScores &b, size_t k);

struct DiversityCurve {
  std::vector<std::pair<size_t, size_t>> points;  // (N, distinct host countries)
  bool unknown_seen = false;
};

// Distinct host countries among the top N classes for every N in `grid`.
// Classes without metadata count under kUnknownRegion.
DiversityCurve ComputeDiversityCurve(const RelevanceScores &scores, const ClassMetadata &meta,
                                     const std::vector<size_t> &grid);

enum class RegionLevel { kCountry, kContinent };
RegionLevel ParseRegionLevel(const std::string &name);
const char *RegionLevelName(RegionLevel level);

struct RegionBreakdown {
  std::map<std::string, double> shares;
  size_t n_used = 0;
  bool unknown_seen = false;
};

RegionBreakdown ComputeRegionBreakdown(const RelevanceScores &scores, const ClassMetadata &meta,
                                       size_t n, RegionLevel level);

struct StratumRanking {
  Ranking ranking;
  bool matched = false;  // false when the pattern covers no stratum
};

// Ranks classes by sum_h A_{c,h} over the full strata covered by `pattern`.
// Callers publish only suppressed matrices.
StratumRanking PerStratumRanking(const ContributionMatrix &matrix, const Stratum &pattern,
                                 size_t n);

std::string FormatRanking(const Ranking &ranking);
std::string FormatOverlap(const OverlapResult &overlap);
std::string FormatDiversityCurve(const DiversityCurve &curve);
std::string FormatRegionBreakdown(const RegionBreakdown &breakdown);

// e.g. "top_n-N10-1a2b3c4d.csv"; `param` may be empty.
std::string ReportFileName(const std::string &report, const std::string &param,
                           const BoostConfig &boost);

}  // namespace fairrel

#endif  // FAIRREL_REPORTS_H_
