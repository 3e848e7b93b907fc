// fairrel/privacy.cc

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

#include "fairrel/privacy.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairrel/io.h"
#include "fairrel/random.h"

namespace fairrel {

double PrivacyConfig::SensitivityFor(const WeightingConfig &weighting) const {
  if (sensitivity) return *sensitivity;
  double w_max = weighting.MaxWeight();
  if (!std::isfinite(w_max))
    throw Error(ErrorCode::kMissingSensitivity,
                "linear weighting has no cap; set privacy.sensitivity");
  return w_max;
}

void PrivacyConfig::Validate() const {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "privacy.k must be >= 1");
  if (epsilon && !(*epsilon > 0.0))
    throw Error(ErrorCode::kInvalidConfig, "privacy.epsilon must be positive");
  if (sensitivity && !(*sensitivity > 0.0))
    throw Error(ErrorCode::kInvalidConfig, "privacy.sensitivity must be positive");
}

SuppressedMatrix Suppress(const ContributionMatrix &matrix, const PrivacyConfig &config) {
  config.Validate();
  SuppressedMatrix out;
  out.matrix = matrix.Filtered([&](const Stratum &stratum, const std::string &,
                                   const ContributionMatrix::Cell &cell) {
    if (cell.NumContributors() >= config.k) return true;
    ++out.audit.suppressed_cells[stratum];
    ++out.audit.total_suppressed;
    return false;
  });
  return out;
}

ContributionMatrix AddDpNoise(const ContributionMatrix &matrix, const PrivacyConfig &config,
                              std::uint64_t seed) {
  config.Validate();
  if (!config.epsilon) throw Error(ErrorCode::kMissingEpsilon, "privacy.epsilon is not set");
  const double scale = config.SensitivityFor(matrix.weighting()) / *config.epsilon;
  Rng rng(seed);
  return matrix.WithWeights([&](const Stratum &, const std::string &,
                                const ContributionMatrix::Cell &cell) {
    return std::max(0.0, cell.weight + rng.Laplace(scale));
  });
}

std::string FormatAudit(const SuppressionAudit &audit, const DemographicSchema &schema) {
  std::ostringstream os;
  os << "stratum,suppressed_cells\n";
  for (const auto &[stratum, n] : audit.suppressed_cells)
    os << schema.EncodeStratum(stratum) << "," << n << "\n";
  return os.str();
}

std::string FormatMatrix(const ContributionMatrix &matrix, const DemographicSchema &schema) {
  std::ostringstream os;
  os << "stratum,class_id,weight,contributors\n";
  for (const auto &[stratum, classes] : matrix.cells())
    for (const auto &[class_id, cell] : classes)
      os << schema.EncodeStratum(stratum) << "," << CsvEscape(class_id) << ","
         << FormatReal(cell.weight) << "," << cell.NumContributors() << "\n";
  return os.str();
}

}  // namespace fairrel
