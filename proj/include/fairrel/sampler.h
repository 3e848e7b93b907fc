// fairrel/sampler.h

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

#ifndef FAIRREL_SAMPLER_H_
#define FAIRREL_SAMPLER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairrel/core.h"

namespace fairrel {

enum class SamplingMode { kMultinomial, kPoisson };
const char *SamplingModeName(SamplingMode mode);
SamplingMode ParseSamplingMode(const std::string &name);

struct SampleAllocation {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kMultinomial;
  std::string rng;

  std::uint64_t Total() const;
};

// Multinomial: one Multinomial(budget, scores) draw, counts sum to budget.
// Poisson: independent Poisson(budget * p_c) per class.  Classes are visited
// in class_id order so the draw depends only on (scores, budget, seed, mode).
// Throws kUnnormalizedScores unless the scores sum to 1 within 1e-9.
SampleAllocation Allocate(const RelevanceScores &scores, std::uint64_t budget,
                          std::uint64_t seed, SamplingMode mode = SamplingMode::kMultinomial);

struct AllocationRow {
  std::string class_id;
  double score = 0.0;
  double expected = 0.0;  // budget * p
  std::uint64_t drawn = 0;
};

struct AllocationReport {
  std::vector<AllocationRow> rows;  // canonical score order
  double median_score = 0.0;
  size_t long_tail_classes = 0;  // score strictly below the median
  size_t long_tail_sampled = 0;  // ... that received at least one sample
};

AllocationReport MakeAllocationReport(const SampleAllocation &alloc,
                                      const RelevanceScores &scores);

// class_id,expected,drawn
std::string FormatAllocation(const AllocationReport &report);
// {"budget":..,"mode":..,"rng":..,"seed":..}
std::string FormatAllocationMetadata(const SampleAllocation &alloc);

}  // namespace fairrel

#endif  // FAIRREL_SAMPLER_H_
