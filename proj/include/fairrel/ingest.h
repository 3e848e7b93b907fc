// fairrel/ingest.h

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

#ifndef FAIRREL_INGEST_H_
#define FAIRREL_INGEST_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fairrel/core.h"

namespace fairrel {

struct IngestReport {
  size_t rows_read = 0;
  size_t rows_accepted = 0;  // source rows that went into a merged record
  size_t rows_rejected = 0;
  size_t records = 0;        // records after merging identical keys
  std::map<std::string, size_t> rejected_by_reason;
  size_t distinct_contributors = 0;
  size_t distinct_classes = 0;
};

struct IngestOptions {
  // Upgrade every rejected row to a thrown Error.
  bool strict = false;
};

// schema.txt: one directive per line, '#' starts a comment.
//   category <name>
//   value <code>
//   parent <child> <parent>
//   unavailable <code>
//   levels <name0> <name1> ...
// value/parent/unavailable/levels apply to the most recent category.
DemographicSchema ParseSchema(std::istream &in);
DemographicSchema LoadSchema(const std::string &path);
std::string FormatSchema(const DemographicSchema &schema);

// Rows with identical (contributor_id, class_id, demographics) are merged by
// summing item_count.  The result is sorted by that key, so row order never
// matters.  Bad rows are counted in `report` and skipped unless strict.
std::vector<ContributionRecord> ParseContributions(std::istream &in,
                                                   const DemographicSchema &schema,
                                                   IngestReport *report,
                                                   const IngestOptions &options = {});
std::vector<ContributionRecord> LoadContributions(const std::string &path,
                                                  const DemographicSchema &schema,
                                                  IngestReport *report,
                                                  const IngestOptions &options = {});
std::string FormatContributions(const std::vector<ContributionRecord> &records,
                                const DemographicSchema &schema);

PopulationTable ParsePopulation(std::istream &in, const DemographicSchema &schema);
PopulationTable LoadPopulation(const std::string &path, const DemographicSchema &schema);
std::string FormatPopulation(const PopulationTable &table, const DemographicSchema &schema);

// When `schema` has a category named `geo_category`, each class's country
// must be one of its values (and the continent, if the category has a
// hierarchy, its level-1 ancestor); other entries are rejected and counted.
ClassMetadata ParseClassMetadata(std::istream &in, const DemographicSchema *schema = nullptr,
                                 const std::string &geo_category = "country");
ClassMetadata LoadClassMetadata(const std::string &path,
                                const DemographicSchema *schema = nullptr,
                                const std::string &geo_category = "country");
std::string FormatClassMetadata(const ClassMetadata &meta);

}  // namespace fairrel

#endif  // FAIRREL_INGEST_H_
