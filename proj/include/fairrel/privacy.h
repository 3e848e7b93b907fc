// fairrel/privacy.h

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

#ifndef FAIRREL_PRIVACY_H_
#define FAIRREL_PRIVACY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "fairrel/core.h"

namespace fairrel {

struct PrivacyConfig {
  enum class Scope { kReports, kScores };

  // Minimum distinct contributors behind any published cell.
  size_t k = 10;
  // Laplace noise is only available when epsilon is set.
  std::optional<double> epsilon;
  // Per-contributor change bound of any A_{c,h}; defaults to the weight cap.
  std::optional<double> sensitivity;
  Scope noise_scope = Scope::kReports;
  Scope suppress_scope = Scope::kReports;

  // Throws kMissingSensitivity when neither set nor bounded by `weighting`.
  double SensitivityFor(const WeightingConfig &weighting) const;
  void Validate() const;
};

struct SuppressionAudit {
  std::map<Stratum, size_t> suppressed_cells;  // strata with >= 1 removal
  size_t total_suppressed = 0;
};

struct SuppressedMatrix {
  ContributionMatrix matrix;
  SuppressionAudit audit;
};

// Removes every cell backed by fewer than k distinct contributors.
SuppressedMatrix Suppress(const ContributionMatrix &matrix, const PrivacyConfig &config);

// Adds Laplace(0, sensitivity / epsilon) to every A_{c,h} in canonical cell
// order and clamps at 0.
ContributionMatrix AddDpNoise(const ContributionMatrix &matrix, const PrivacyConfig &config,
                              std::uint64_t seed);

// stratum,suppressed_cells
std::string FormatAudit(const SuppressionAudit &audit, const DemographicSchema &schema);

// stratum,class_id,weight,contributors for cells that survived suppression.
std::string FormatMatrix(const ContributionMatrix &matrix, const DemographicSchema &schema);

}  // namespace fairrel

#endif  // FAIRREL_PRIVACY_H_
