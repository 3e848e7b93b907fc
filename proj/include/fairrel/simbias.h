// fairrel/simbias.h

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

#ifndef FAIRREL_SIMBIAS_H_
#define FAIRREL_SIMBIAS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairrel/core.h"

namespace fairrel {

// A synthetic world with one demographic category ("country", grouped into
// continents).  Contributors are drawn from the biased mix `bias`, upload a
// log-uniform number of items in [1, n_max], and each item's class follows
// the preference row of their stratum.
struct Scenario {
  std::vector<std::string> countries;
  std::vector<std::string> continents;     // parent of each country
  std::vector<std::uint64_t> population;   // true N_h
  std::vector<double> bias;                // B(h), contributor mix
  std::vector<std::vector<double>> preference;  // Q(c|h), one row per country
  std::vector<size_t> host;                // host country index of each class
  size_t num_contributors = 5000;
  std::uint64_t n_max = 2000;
  std::uint64_t seed = 1;
  // Weighting used when the scenario is scored end to end.
  WeightingConfig weighting{WeightingConfig::Kind::kLinear};

  size_t NumClasses() const { return host.size(); }
  std::string ClassId(size_t c) const;
  // Throws kInvalidScenario on any violated invariant.
  void Validate() const;
  DemographicSchema Schema() const;
};

// Q(c|h) = common * z(c) + (1 - common) * z((c + rotation * h) mod C), with
// z the normalized 1/(1+r) profile: a shared taste plus a local one.  Each
// class is hosted by the country that ranks it highest locally.
void FillRotatedPreferences(Scenario *scenario, size_t num_classes, double common,
                            size_t rotation);

// 3 countries with true shares (0.2, 0.3, 0.5), contributor mix
// (0.7, 0.2, 0.1), 20 classes, 5000 contributors.
Scenario DefaultScenario();
// Same world with contributor mix equal to the population mix.
Scenario NullBiasScenario();

// key = value text; see FormatScenario for the keys.
Scenario ParseScenario(std::istream &in);
Scenario LoadScenario(const std::string &path);
std::string FormatScenario(const Scenario &scenario);

struct SimulatedWorld {
  DemographicSchema schema;
  std::vector<ContributionRecord> records;  // sorted by (contributor, class)
  PopulationTable population;
  ClassMetadata classes;
};

// Contributor u draws from its own stream DeriveSeed(seed, u), so the output
// does not depend on `threads`.
SimulatedWorld Generate(const Scenario &scenario, unsigned threads = 1);

// P*(c) = sum_h Q(c|h) N_h / N_W.
RelevanceScores TrueRelevance(const Scenario &scenario);
// Limit of the unstratified share under linear weighting:
// sum_h Q(c|h) B(h), the volume law being the same in every stratum.
RelevanceScores UnstratifiedLimit(const Scenario &scenario);

struct EvaluationMetrics {
  double l1 = 0.0;
  double max_abs = 0.0;
  size_t k = 0;
  double overlap_at_k = 0.0;
  // Fraction of class pairs ordered the same way (ties agree only with ties).
  double pairwise_agreement = 0.0;
};

// Throws kClassSetMismatch when the class sets differ.
EvaluationMetrics Evaluate(const RelevanceScores &estimated, const RelevanceScores &truth,
                           size_t k = 10);

}  // namespace fairrel

#endif  // FAIRREL_SIMBIAS_H_
