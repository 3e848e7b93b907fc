// fairrel/reports.cc

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

#include "fairrel/reports.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "fairrel/io.h"

namespace fairrel {

Ranking TopN(const RelevanceScores &scores, size_t n) {
  Ranking ranked = scores.Ranked();
  if (ranked.size() > n) ranked.resize(n);
  return ranked;
}

OverlapResult OverlapAtK(const RelevanceScores &a, const RelevanceScores &b, size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidConfig, "overlap needs k >= 1");
  OverlapResult out;
  out.k_used = std::min({k, a.score.size(), b.score.size()});
  out.truncated = out.k_used < k;
  if (out.k_used == 0) return out;
  std::set<std::string> top_a;
  for (const auto &[id, s] : TopN(a, out.k_used)) top_a.insert(id);
  size_t shared = 0;
  for (const auto &[id, s] : TopN(b, out.k_used)) shared += top_a.count(id);
  out.value = static_cast<double>(shared) / static_cast<double>(out.k_used);
  return out;
}

namespace {

const std::string &RegionOf(const ClassMetadata &meta, const std::string &class_id,
                            RegionLevel level, bool *unknown) {
  static const std::string kUnknown = kUnknownRegion;
  auto it = meta.classes.find(class_id);
  if (it == meta.classes.end()) {
    *unknown = true;
    return kUnknown;
  }
  return level == RegionLevel::kCountry ? it->second.country : it->second.continent;
}

}  // namespace

DiversityCurve ComputeDiversityCurve(const RelevanceScores &scores, const ClassMetadata &meta,
                                     const std::vector<size_t> &grid) {
  DiversityCurve curve;
  const Ranking ranked = scores.Ranked();
  std::vector<size_t> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::set<std::string> seen;
  size_t consumed = 0;
  for (size_t n : sorted) {
    for (; consumed < std::min(n, ranked.size()); ++consumed)
      seen.insert(RegionOf(meta, ranked[consumed].first, RegionLevel::kCountry,
                           &curve.unknown_seen));
    curve.points.emplace_back(n, seen.size());
  }
  return curve;
}

RegionLevel ParseRegionLevel(const std::string &name) {
  if (name == "country") return RegionLevel::kCountry;
  if (name == "continent") return RegionLevel::kContinent;
  throw Error(ErrorCode::kInvalidConfig, "region level must be country or continent");
}

const char *RegionLevelName(RegionLevel level) {
  return level == RegionLevel::kCountry ? "country" : "continent";
}

RegionBreakdown ComputeRegionBreakdown(const RelevanceScores &scores, const ClassMetadata &meta,
                                       size_t n, RegionLevel level) {
  RegionBreakdown out;
  const Ranking top = TopN(scores, n);
  out.n_used = top.size();
  if (top.empty()) return out;
  std::map<std::string, size_t> counts;
  for (const auto &[id, s] : top) ++counts[RegionOf(meta, id, level, &out.unknown_seen)];
  for (const auto &[region, c] : counts)
    out.shares[region] = static_cast<double>(c) / static_cast<double>(top.size());
  return out;
}

StratumRanking PerStratumRanking(const ContributionMatrix &matrix, const Stratum &pattern,
                                 size_t n) {
  StratumRanking out;
  std::map<std::string, double> totals;
  for (const auto &[stratum, classes] : matrix.cells()) {
    if (!pattern.Covers(stratum)) continue;
    out.matched = true;
    for (const auto &[class_id, cell] : classes) totals[class_id] += cell.weight;
  }
  out.ranking = CanonicalRanking(totals);
  if (out.ranking.size() > n) out.ranking.resize(n);
  return out;
}

std::string FormatRanking(const Ranking &ranking) {
  std::ostringstream os;
  os << "rank,class_id,score\n";
  for (size_t i = 0; i < ranking.size(); ++i)
    os << i + 1 << "," << CsvEscape(ranking[i].first) << "," << FormatReal(ranking[i].second)
       << "\n";
  return os.str();
}

std::string FormatOverlap(const OverlapResult &overlap) {
  std::ostringstream os;
  os << "k,overlap,truncated\n"
     << overlap.k_used << "," << FormatReal(overlap.value) << ","
     << (overlap.truncated ? 1 : 0) << "\n";
  return os.str();
}

std::string FormatDiversityCurve(const DiversityCurve &curve) {
  std::ostringstream os;
  os << "n,countries\n";
  for (const auto &[n, c] : curve.points) os << n << "," << c << "\n";
  return os.str();
}

std::string FormatRegionBreakdown(const RegionBreakdown &breakdown) {
  std::ostringstream os;
  os << "region,share\n";
  for (const auto &[region, share] : breakdown.shares)
    os << CsvEscape(region) << "," << FormatReal(share) << "\n";
  return os.str();
}

std::string ReportFileName(const std::string &report, const std::string &param,
                           const BoostConfig &boost) {
  std::string name = report;
  if (!param.empty()) name += "-" + param;
  name += "-" + Sha256Hex(boost.Describe()).substr(0, 8) + ".csv";
  return name;
}

}  // namespace fairrel
