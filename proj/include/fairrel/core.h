// fairrel/core.h

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

#ifndef FAIRREL_CORE_H_
#define FAIRREL_CORE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fairrel {

enum class ErrorCode {
  kDuplicateCategory,
  kDuplicateValue,
  kInvalidCode,
  kCyclicHierarchy,
  kUnknownParent,
  kIncompleteHierarchy,
  kUnknownCategory,
  kUnknownValue,
  kMissingColumn,
  kNonPositiveCount,
  kMalformedRow,
  kDuplicateStratum,
  kNegativePopulation,
  kMissingWorldTotal,
  kInconsistentPopulation,
  kMissingMarginal,
  kEmptyTable,
  kNoContributors,
  kUnresolvedUnspecified,
  kZeroPopulationAtBoostLevel,
  kInvalidBoost,
  kUnnormalizedScores,
  kMissingEpsilon,
  kMissingSensitivity,
  kClassSetMismatch,
  kNotMergeable,
  kInvalidScenario,
  kInvalidConfig,
  kConflictingOptions,
  kParse,
  kIo,
};

const char *ErrorCodeName(ErrorCode code);

// All validation and I/O failures in the library are reported by throwing
// this type.  The CLI maps kIo to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message) {}
  ErrorCode code() const { return code_; }
  // Message without the code prefix.
  const std::string &message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

using ValueId = std::int32_t;
inline constexpr ValueId kWildcard = -1;
inline constexpr ValueId kUnspecified = -2;
inline constexpr std::string_view kUnspecifiedCode = "UNSPECIFIED";
inline constexpr std::string_view kWildcardCode = "*";

// One value index per schema category.  kWildcard marks a marginal
// position; kUnspecified only ever appears in raw contribution records.
class Stratum {
 public:
  Stratum() = default;
  explicit Stratum(std::vector<ValueId> values) : values_(std::move(values)) {}

  static Stratum AllWildcard(size_t num_categories) {
    return Stratum(std::vector<ValueId>(num_categories, kWildcard));
  }

  size_t size() const { return values_.size(); }
  ValueId operator[](size_t i) const { return values_[i]; }
  const std::vector<ValueId> &values() const { return values_; }

  bool IsFull() const;
  bool HasUnspecified() const;
  size_t NumWildcards() const;
  // True when every non-wildcard position equals the one in `other`.
  bool Covers(const Stratum &other) const;
  Stratum With(size_t category, ValueId value) const;

  friend auto operator<=>(const Stratum &, const Stratum &) = default;

 private:
  std::vector<ValueId> values_;
};

struct Category {
  std::string name;
  std::vector<std::string> values;
  // Child code -> parent code, across every hierarchy level.  Empty when
  // the category is flat.
  std::map<std::string, std::string> parent;
  // Optional names for hierarchy levels; index 0 names the values themselves.
  std::vector<std::string> level_names;
  std::set<std::string> unavailable;
};

class DemographicSchema {
 public:
  DemographicSchema() = default;
  // Validates names, codes and hierarchies; throws Error on violation.
  explicit DemographicSchema(std::vector<Category> categories);

  size_t NumCategories() const { return categories_.size(); }
  const Category &category(size_t i) const { return categories_[i]; }
  const std::vector<Category> &categories() const { return categories_; }

  std::optional<size_t> FindCategory(std::string_view name) const;
  size_t CategoryIndex(std::string_view name) const;  // throws if absent
  std::optional<ValueId> FindValue(size_t category, std::string_view code) const;
  const std::string &ValueCode(size_t category, ValueId value) const;
  size_t NumValues(size_t category) const { return categories_[category].values.size(); }
  bool IsUnavailable(size_t category, ValueId value) const;
  bool HasUnavailable(size_t category) const {
    return !categories_[category].unavailable.empty();
  }

  // Number of hierarchy levels, 1 for a flat category.
  size_t NumLevels(size_t category) const { return depth_[category]; }
  // Accepts a level name or a decimal depth.
  std::optional<size_t> FindLevel(size_t category, std::string_view level) const;
  std::string LevelName(size_t category, size_t level) const;
  // Code of the ancestor of `value` at `level` (level 0 is the value itself).
  const std::string &Ancestor(size_t category, ValueId value, size_t level) const;

  std::string EncodeStratum(const Stratum &stratum) const;
  Stratum DecodeStratum(std::string_view text) const;

  // Cartesian product of values in schema order.
  std::vector<Stratum> FullStrata(bool include_unavailable) const;

  // Copy of this schema with an extra value appended to `category`.
  DemographicSchema WithValue(size_t category, const std::string &code,
                              bool unavailable) const;

 private:
  std::vector<Category> categories_;
  std::vector<std::unordered_map<std::string, ValueId>> index_;
  std::vector<size_t> depth_;
};

// Per-contributor-per-class weight w(n).  kLogThreshold is
// min(1 + log_b(n), 1 + log_b(n_cap)); kLinear passes n through.
struct WeightingConfig {
  enum class Kind { kLogThreshold, kLinear };
  Kind kind = Kind::kLogThreshold;
  std::uint64_t n_cap = 1000;
  double log_base = 0.0;  // <= 0 means natural log

  double Weight(std::uint64_t n) const;
  // Largest value Weight can return; infinite for kLinear.
  double MaxWeight() const;
  std::string Describe() const;
  bool operator==(const WeightingConfig &) const = default;
};

struct ContributionRecord {
  std::string contributor_id;
  std::string class_id;
  std::uint64_t item_count = 0;
  Stratum demographics;
};

// Weighted contribution mass A_{c,h} per (class, full stratum) together with
// the per-contributor item tallies it was computed from.  Keeping the
// tallies makes Merge exact: counts are summed and weights recomputed, so any
// partition of the input folds to the same bits.
class ContributionMatrix {
 public:
  struct Cell {
    double weight = 0.0;
    std::map<std::string, std::uint64_t> items_by_contributor;
    size_t NumContributors() const { return items_by_contributor.size(); }
    bool operator==(const Cell &) const = default;
  };
  using ClassCells = std::map<std::string, Cell>;

  class Builder {
   public:
    explicit Builder(size_t num_categories) : num_categories_(num_categories) {}
    void Add(const std::string &contributor_id, const std::string &class_id,
             const Stratum &stratum, std::uint64_t items);
    ContributionMatrix Build(const WeightingConfig &weighting) &&;

   private:
    size_t num_categories_;
    std::map<Stratum, std::map<std::string, std::map<std::string, std::uint64_t>>> tallies_;
  };

  ContributionMatrix() = default;

  size_t num_categories() const { return num_categories_; }
  const WeightingConfig &weighting() const { return weighting_; }
  // True once weights were overwritten (noise); such matrices cannot merge.
  bool weights_overridden() const { return weights_overridden_; }

  const std::map<Stratum, ClassCells> &cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }
  size_t NumCells() const;
  const Cell *FindCell(const std::string &class_id, const Stratum &stratum) const;

  double StratumTotal(const Stratum &stratum) const;                // A_h
  size_t StratumContributors(const Stratum &stratum) const;         // M_h
  size_t TotalContributors() const { return all_contributors_.size(); }  // M_W
  // Distinct contributors whose stratum has `value` in `category` (M_a).
  size_t ValueContributors(size_t category, ValueId value) const;
  std::set<std::string> ClassIds() const;
  // A_c = sum_h A_{c,h}, reduced in canonical stratum order.
  std::map<std::string, double> ClassTotals() const;
  double GrandTotal() const;

  const std::map<Stratum, double> &stratum_totals() const { return stratum_totals_; }
  const std::map<Stratum, std::set<std::string>> &stratum_contributors() const {
    return stratum_contributors_;
  }

  ContributionMatrix Merge(const ContributionMatrix &other) const;

  // Drops every cell for which `keep` is false and recomputes A_h.
  ContributionMatrix Filtered(
      const std::function<bool(const Stratum &, const std::string &, const Cell &)> &keep) const;
  // Replaces every cell weight; marks the result as overridden.
  ContributionMatrix WithWeights(
      const std::function<double(const Stratum &, const std::string &, const Cell &)> &weight) const;

  bool operator==(const ContributionMatrix &) const = default;

 private:
  void RecomputeTotals();

  size_t num_categories_ = 0;
  WeightingConfig weighting_;
  bool weights_overridden_ = false;
  std::map<Stratum, ClassCells> cells_;
  std::map<Stratum, double> stratum_totals_;
  std::map<Stratum, std::set<std::string>> stratum_contributors_;
  std::set<std::string> all_contributors_;
};

// Population counts keyed by full or marginal strata.  Combinations missing
// from the source are absent, never zero.
class PopulationTable {
 public:
  PopulationTable() = default;
  PopulationTable(size_t num_categories, std::map<Stratum, std::uint64_t> entries,
                  std::uint64_t world_total);

  size_t num_categories() const { return num_categories_; }
  std::uint64_t world_total() const { return world_total_; }
  const std::map<Stratum, std::uint64_t> &entries() const { return entries_; }

  std::optional<std::uint64_t> Find(const Stratum &stratum) const;
  // Exact entry if present, else the sum of the full entries the pattern
  // covers, else nothing.
  std::optional<std::uint64_t> Population(const Stratum &pattern) const;

 private:
  size_t num_categories_ = 0;
  std::map<Stratum, std::uint64_t> entries_;
  std::uint64_t world_total_ = 0;
};

enum class PriorSource { kCensus, kFallbackContributor, kProductOfMarginals };
const char *PriorSourceName(PriorSource source);

struct PriorEntry {
  double probability = 0.0;
  PriorSource source = PriorSource::kCensus;
  bool operator==(const PriorEntry &) const = default;
};

struct PriorVector {
  std::map<Stratum, PriorEntry> entries;
  bool fallback_applied = false;

  double Sum() const;
  double At(const Stratum &stratum) const;  // 0 when absent
  bool operator==(const PriorVector &) const = default;
};

enum class BoostFunction { kIdentity, kSqrt, kLog1p };
const char *BoostFunctionName(BoostFunction f);
BoostFunction ParseBoostFunction(std::string_view name);
double ApplyBoostFunction(BoostFunction f, double x);

struct CategoryBoost {
  BoostFunction function = BoostFunction::kIdentity;
  size_t level = 0;  // hierarchy depth at which populations are pooled
  bool operator==(const CategoryBoost &) const = default;
};

struct BoostConfig {
  enum class Mode { kJoint, kIndependent };
  std::map<std::string, CategoryBoost> categories;  // keyed by category name
  Mode mode = Mode::kJoint;

  bool IsIdentity() const;
  // Stable textual form, used for report file digests and manifests.
  std::string Describe() const;
  bool operator==(const BoostConfig &) const = default;
};

struct RelevanceScores {
  std::map<std::string, double> score;        // normalized when `normalized`
  std::map<std::string, double> raw_utility;  // U(c) before normalization
  BoostConfig boost;
  bool normalized = false;

  // Canonical order: descending score, then ascending class_id bytes.
  std::vector<std::pair<std::string, double>> Ranked() const;
  double Sum() const;
};

std::vector<std::pair<std::string, double>> CanonicalRanking(
    const std::map<std::string, double> &scores);

struct ClassInfo {
  std::string name;
  std::string country;
  std::string continent;
  bool operator==(const ClassInfo &) const = default;
};

struct ClassMetadata {
  std::map<std::string, ClassInfo> classes;
  size_t rejected = 0;
};

}  // namespace fairrel

#endif  // FAIRREL_CORE_H_
