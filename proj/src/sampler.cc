// fairrel/sampler.cc

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

#include "fairrel/sampler.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairrel/io.h"
#include "fairrel/random.h"
#include "json.hpp"

namespace fairrel {

const char *SamplingModeName(SamplingMode mode) {
  return mode == SamplingMode::kMultinomial ? "multinomial" : "poisson";
}

SamplingMode ParseSamplingMode(const std::string &name) {
  if (name == "multinomial") return SamplingMode::kMultinomial;
  if (name == "poisson") return SamplingMode::kPoisson;
  throw Error(ErrorCode::kInvalidConfig, "unknown sampling mode '" + name + "'");
}

std::uint64_t SampleAllocation::Total() const {
  std::uint64_t total = 0;
  for (const auto &[id, n] : counts) total += n;
  return total;
}

SampleAllocation Allocate(const RelevanceScores &scores, std::uint64_t budget,
                          std::uint64_t seed, SamplingMode mode) {
  if (!scores.normalized || std::fabs(scores.Sum() - 1.0) > 1e-9)
    throw Error(ErrorCode::kUnnormalizedScores,
                "scores sum to " + FormatReal(scores.Sum()) + ", expected 1");
  SampleAllocation alloc;
  alloc.budget = budget;
  alloc.seed = seed;
  alloc.mode = mode;
  alloc.rng = Rng::kAlgorithm;

  std::vector<double> probs;
  probs.reserve(scores.score.size());
  for (const auto &[id, p] : scores.score) probs.push_back(p);

  Rng rng(seed);
  std::vector<std::uint64_t> counts;
  if (mode == SamplingMode::kMultinomial) {
    counts = rng.Multinomial(budget, probs);
  } else {
    for (double p : probs) counts.push_back(rng.Poisson(static_cast<double>(budget) * p));
  }
  size_t i = 0;
  for (const auto &[id, p] : scores.score) alloc.counts.emplace(id, counts[i++]);
  return alloc;
}

AllocationReport MakeAllocationReport(const SampleAllocation &alloc,
                                      const RelevanceScores &scores) {
  AllocationReport report;
  std::vector<double> values;
  for (const auto &[id, s] : scores.Ranked()) {
    auto it = alloc.counts.find(id);
    report.rows.push_back(AllocationRow{id, s, static_cast<double>(alloc.budget) * s,
                                        it == alloc.counts.end() ? 0 : it->second});
    values.push_back(s);
  }
  if (!values.empty()) {
    std::sort(values.begin(), values.end());
    const size_t m = values.size();
    report.median_score = m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
  }
  for (const AllocationRow &row : report.rows) {
    if (row.score >= report.median_score) continue;
    ++report.long_tail_classes;
    if (row.drawn > 0) ++report.long_tail_sampled;
  }
  return report;
}

std::string FormatAllocation(const AllocationReport &report) {
  std::ostringstream os;
  os << "class_id,expected,drawn\n";
  for (const AllocationRow &row : report.rows)
    os << CsvEscape(row.class_id) << "," << FormatReal(row.expected) << "," << row.drawn << "\n";
  return os.str();
}

std::string FormatAllocationMetadata(const SampleAllocation &alloc) {
  nlohmann::json j;
  j["budget"] = alloc.budget;
  j["seed"] = alloc.seed;
  j["mode"] = SamplingModeName(alloc.mode);
  j["rng"] = alloc.rng;
  return j.dump(2) + "\n";
}

}  // namespace fairrel
