// fairrel/core.cc

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

#include "fairrel/core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fairrel {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateCategory: return "DuplicateCategory";
    case ErrorCode::kDuplicateValue: return "DuplicateValue";
    case ErrorCode::kInvalidCode: return "InvalidCode";
    case ErrorCode::kCyclicHierarchy: return "CyclicHierarchy";
    case ErrorCode::kUnknownParent: return "UnknownParent";
    case ErrorCode::kIncompleteHierarchy: return "IncompleteHierarchy";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kUnknownValue: return "UnknownValue";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kNonPositiveCount: return "NonPositiveCount";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kDuplicateStratum: return "DuplicateStratum";
    case ErrorCode::kNegativePopulation: return "NegativePopulation";
    case ErrorCode::kMissingWorldTotal: return "MissingWorldTotal";
    case ErrorCode::kInconsistentPopulation: return "InconsistentPopulation";
    case ErrorCode::kMissingMarginal: return "MissingMarginal";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kNoContributors: return "NoContributors";
    case ErrorCode::kUnresolvedUnspecified: return "UnresolvedUnspecified";
    case ErrorCode::kZeroPopulationAtBoostLevel: return "ZeroPopulationAtBoostLevel";
    case ErrorCode::kInvalidBoost: return "InvalidBoost";
    case ErrorCode::kUnnormalizedScores: return "UnnormalizedScores";
    case ErrorCode::kMissingEpsilon: return "MissingEpsilon";
    case ErrorCode::kMissingSensitivity: return "MissingSensitivity";
    case ErrorCode::kClassSetMismatch: return "ClassSetMismatch";
    case ErrorCode::kNotMergeable: return "NotMergeable";
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kConflictingOptions: return "ConflictingOptions";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- Stratum

bool Stratum::IsFull() const {
  return std::all_of(values_.begin(), values_.end(), [](ValueId v) { return v >= 0; });
}

bool Stratum::HasUnspecified() const {
  return std::find(values_.begin(), values_.end(), kUnspecified) != values_.end();
}

size_t Stratum::NumWildcards() const {
  return static_cast<size_t>(std::count(values_.begin(), values_.end(), kWildcard));
}

bool Stratum::Covers(const Stratum &other) const {
  if (other.size() != size()) return false;
  for (size_t i = 0; i < values_.size(); ++i)
    if (values_[i] != kWildcard && values_[i] != other.values_[i]) return false;
  return true;
}

Stratum Stratum::With(size_t category, ValueId value) const {
  std::vector<ValueId> v = values_;
  v.at(category) = value;
  return Stratum(std::move(v));
}

// ------------------------------------------------------- DemographicSchema

namespace {

bool IsValidCode(std::string_view code) {
  if (code.empty()) return false;
  return code.find_first_of("|=,* \t\r\n\"") == std::string_view::npos;
}

}  // namespace

DemographicSchema::DemographicSchema(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  std::set<std::string> names;
  for (const Category &cat : categories_) {
    if (!IsValidCode(cat.name))
      throw Error(ErrorCode::kInvalidCode, "bad category name '" + cat.name + "'");
    if (!names.insert(cat.name).second)
      throw Error(ErrorCode::kDuplicateCategory, cat.name);

    std::unordered_map<std::string, ValueId> idx;
    for (size_t i = 0; i < cat.values.size(); ++i) {
      const std::string &code = cat.values[i];
      if (!IsValidCode(code))
        throw Error(ErrorCode::kInvalidCode, cat.name + ": bad value code '" + code + "'");
      if (code == kUnspecifiedCode)
        throw Error(ErrorCode::kInvalidCode,
                    cat.name + ": UNSPECIFIED is reserved for records");
      if (!idx.emplace(code, static_cast<ValueId>(i)).second)
        throw Error(ErrorCode::kDuplicateValue, cat.name + "=" + code);
    }
    for (const std::string &u : cat.unavailable)
      if (!idx.count(u))
        throw Error(ErrorCode::kUnknownValue, cat.name + ": unavailable code '" + u + "'");

    size_t depth = 1;
    if (!cat.parent.empty()) {
      // Every key must be a value or an interior node reachable from one.
      std::set<std::string> reachable;
      std::optional<size_t> common_depth;
      for (const std::string &v : cat.values) {
        std::set<std::string> seen{v};
        std::string node = v;
        size_t levels = 1;
        for (auto it = cat.parent.find(node); it != cat.parent.end();
             it = cat.parent.find(node)) {
          node = it->second;
          if (!IsValidCode(node))
            throw Error(ErrorCode::kInvalidCode, cat.name + ": bad parent code '" + node + "'");
          if (!seen.insert(node).second)
            throw Error(ErrorCode::kCyclicHierarchy, cat.name + " at '" + v + "'");
          reachable.insert(it->first);
          ++levels;
        }
        if (levels == 1)
          throw Error(ErrorCode::kIncompleteHierarchy, cat.name + ": no parent for '" + v + "'");
        if (common_depth && *common_depth != levels)
          throw Error(ErrorCode::kIncompleteHierarchy,
                      cat.name + ": ragged hierarchy at '" + v + "'");
        common_depth = levels;
      }
      for (const auto &[child, parent] : cat.parent)
        if (!reachable.count(child))
          throw Error(ErrorCode::kUnknownParent,
                      cat.name + ": '" + child + "' is not a value or ancestor of one");
      depth = *common_depth;
    }
    if (cat.level_names.size() > depth)
      throw Error(ErrorCode::kIncompleteHierarchy, cat.name + ": more level names than levels");
    index_.push_back(std::move(idx));
    depth_.push_back(depth);
  }
}

std::optional<size_t> DemographicSchema::FindCategory(std::string_view name) const {
  for (size_t i = 0; i < categories_.size(); ++i)
    if (categories_[i].name == name) return i;
  return std::nullopt;
}

size_t DemographicSchema::CategoryIndex(std::string_view name) const {
  auto idx = FindCategory(name);
  if (!idx) throw Error(ErrorCode::kUnknownCategory, std::string(name));
  return *idx;
}

std::optional<ValueId> DemographicSchema::FindValue(size_t category,
                                                    std::string_view code) const {
  const auto &idx = index_.at(category);
  auto it = idx.find(std::string(code));
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

const std::string &DemographicSchema::ValueCode(size_t category, ValueId value) const {
  return categories_.at(category).values.at(static_cast<size_t>(value));
}

bool DemographicSchema::IsUnavailable(size_t category, ValueId value) const {
  if (value < 0) return false;
  const Category &cat = categories_.at(category);
  return cat.unavailable.count(cat.values.at(static_cast<size_t>(value))) > 0;
}

std::optional<size_t> DemographicSchema::FindLevel(size_t category,
                                                   std::string_view level) const {
  for (size_t i = 0; i < depth_.at(category); ++i)
    if (LevelName(category, i) == level) return i;
  if (!level.empty() && std::all_of(level.begin(), level.end(),
                                    [](char c) { return c >= '0' && c <= '9'; })) {
    size_t d = std::stoul(std::string(level));
    if (d < depth_[category]) return d;
  }
  return std::nullopt;
}

std::string DemographicSchema::LevelName(size_t category, size_t level) const {
  const Category &cat = categories_.at(category);
  if (level < cat.level_names.size()) return cat.level_names[level];
  if (level == 0) return cat.name;
  return cat.name + "." + std::to_string(level);
}

const std::string &DemographicSchema::Ancestor(size_t category, ValueId value,
                                               size_t level) const {
  const Category &cat = categories_.at(category);
  const std::string *node = &cat.values.at(static_cast<size_t>(value));
  for (size_t i = 0; i < level; ++i) {
    auto it = cat.parent.find(*node);
    if (it == cat.parent.end())
      throw Error(ErrorCode::kIncompleteHierarchy,
                  cat.name + ": level " + std::to_string(level) + " out of range");
    node = &it->second;
  }
  return *node;
}

std::string DemographicSchema::EncodeStratum(const Stratum &stratum) const {
  if (stratum.size() != categories_.size())
    throw Error(ErrorCode::kParse, "stratum arity does not match schema");
  std::string out;
  for (size_t i = 0; i < categories_.size(); ++i) {
    if (i) out += '|';
    out += categories_[i].name;
    out += '=';
    ValueId v = stratum[i];
    if (v == kWildcard)
      out += kWildcardCode;
    else if (v == kUnspecified)
      out += kUnspecifiedCode;
    else
      out += ValueCode(i, v);
  }
  return out;
}

Stratum DemographicSchema::DecodeStratum(std::string_view text) const {
  std::vector<std::string_view> parts;
  for (size_t pos = 0;;) {
    size_t end = text.find('|', pos);
    parts.push_back(text.substr(pos, end == std::string_view::npos ? end : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  if (parts.size() != categories_.size())
    throw Error(ErrorCode::kParse, "bad stratum '" + std::string(text) + "'");

  std::vector<ValueId> values;
  for (size_t i = 0; i < parts.size(); ++i) {
    std::string_view part = parts[i];
    size_t eq = part.find('=');
    if (eq == std::string_view::npos || part.substr(0, eq) != categories_[i].name)
      throw Error(ErrorCode::kParse, "bad stratum '" + std::string(text) + "'");
    std::string_view code = part.substr(eq + 1);
    if (code == kWildcardCode) {
      values.push_back(kWildcard);
    } else if (code == kUnspecifiedCode) {
      values.push_back(kUnspecified);
    } else {
      auto v = FindValue(i, code);
      if (!v)
        throw Error(ErrorCode::kUnknownValue, categories_[i].name + "=" + std::string(code));
      values.push_back(*v);
    }
  }
  return Stratum(std::move(values));
}

std::vector<Stratum> DemographicSchema::FullStrata(bool include_unavailable) const {
  std::vector<std::vector<ValueId>> choices(categories_.size());
  for (size_t i = 0; i < categories_.size(); ++i)
    for (size_t v = 0; v < categories_[i].values.size(); ++v)
      if (include_unavailable || !IsUnavailable(i, static_cast<ValueId>(v)))
        choices[i].push_back(static_cast<ValueId>(v));

  std::vector<Stratum> out;
  if (categories_.empty()) return out;
  std::vector<size_t> cursor(categories_.size(), 0);
  for (const auto &c : choices)
    if (c.empty()) return out;
  while (true) {
    std::vector<ValueId> v(categories_.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = choices[i][cursor[i]];
    out.emplace_back(std::move(v));
    size_t i = categories_.size();
    while (i > 0) {
      --i;
      if (++cursor[i] < choices[i].size()) break;
      cursor[i] = 0;
      if (i == 0) return out;
    }
  }
}

DemographicSchema DemographicSchema::WithValue(size_t category, const std::string &code,
                                               bool unavailable) const {
  std::vector<Category> cats = categories_;
  Category &cat = cats.at(category);
  cat.values.push_back(code);
  if (unavailable) cat.unavailable.insert(code);
  if (!cat.parent.empty()) {
    // A synthetic value has no place in the hierarchy; it becomes its own
    // ancestor chain so that depth stays uniform.
    std::string node = code;
    for (size_t level = 1; level < depth_[category]; ++level) {
      std::string up = code + "^" + std::to_string(level);
      cat.parent[node] = up;
      node = up;
    }
  }
  return DemographicSchema(std::move(cats));
}

// --------------------------------------------------------- WeightingConfig

double WeightingConfig::Weight(std::uint64_t n) const {
  if (kind == Kind::kLinear) return static_cast<double>(n);
  if (n == 0) return 0.0;
  std::uint64_t capped = std::min(n, n_cap);
  double w = std::log(static_cast<double>(capped));
  if (log_base > 0.0) w /= std::log(log_base);
  return 1.0 + w;
}

double WeightingConfig::MaxWeight() const {
  if (kind == Kind::kLinear) return std::numeric_limits<double>::infinity();
  return Weight(n_cap);
}

std::string WeightingConfig::Describe() const {
  if (kind == Kind::kLinear) return "linear";
  std::ostringstream os;
  os << "log(n_cap=" << n_cap;
  if (log_base > 0.0) os << ",base=" << log_base;
  os << ")";
  return os.str();
}

// ------------------------------------------------------ ContributionMatrix

void ContributionMatrix::Builder::Add(const std::string &contributor_id,
                                      const std::string &class_id, const Stratum &stratum,
                                      std::uint64_t items) {
  if (stratum.size() != num_categories_ || !stratum.IsFull())
    throw Error(ErrorCode::kUnresolvedUnspecified,
                "contribution stratum must be full (resolve UNSPECIFIED first)");
  tallies_[stratum][class_id][contributor_id] += items;
}

ContributionMatrix ContributionMatrix::Builder::Build(const WeightingConfig &weighting) && {
  ContributionMatrix m;
  m.num_categories_ = num_categories_;
  m.weighting_ = weighting;
  for (auto &[stratum, classes] : tallies_) {
    ClassCells &out = m.cells_[stratum];
    std::set<std::string> &who = m.stratum_contributors_[stratum];
    for (auto &[class_id, items] : classes) {
      Cell cell;
      cell.items_by_contributor = std::move(items);
      for (const auto &[contributor, n] : cell.items_by_contributor) {
        cell.weight += weighting.Weight(n);
        who.insert(contributor);
        m.all_contributors_.insert(contributor);
      }
      out.emplace(class_id, std::move(cell));
    }
  }
  m.RecomputeTotals();
  return m;
}

void ContributionMatrix::RecomputeTotals() {
  stratum_totals_.clear();
  for (const auto &[stratum, classes] : cells_) {
    double total = 0.0;
    for (const auto &[class_id, cell] : classes) total += cell.weight;
    stratum_totals_[stratum] = total;
  }
}

size_t ContributionMatrix::NumCells() const {
  size_t n = 0;
  for (const auto &[stratum, classes] : cells_) n += classes.size();
  return n;
}

const ContributionMatrix::Cell *ContributionMatrix::FindCell(const std::string &class_id,
                                                             const Stratum &stratum) const {
  auto s = cells_.find(stratum);
  if (s == cells_.end()) return nullptr;
  auto c = s->second.find(class_id);
  return c == s->second.end() ? nullptr : &c->second;
}

double ContributionMatrix::StratumTotal(const Stratum &stratum) const {
  auto it = stratum_totals_.find(stratum);
  return it == stratum_totals_.end() ? 0.0 : it->second;
}

size_t ContributionMatrix::StratumContributors(const Stratum &stratum) const {
  auto it = stratum_contributors_.find(stratum);
  return it == stratum_contributors_.end() ? 0 : it->second.size();
}

size_t ContributionMatrix::ValueContributors(size_t category, ValueId value) const {
  std::set<std::string> who;
  for (const auto &[stratum, ids] : stratum_contributors_)
    if (stratum[category] == value) who.insert(ids.begin(), ids.end());
  return who.size();
}

std::set<std::string> ContributionMatrix::ClassIds() const {
  std::set<std::string> ids;
  for (const auto &[stratum, classes] : cells_)
    for (const auto &[class_id, cell] : classes) ids.insert(class_id);
  return ids;
}

std::map<std::string, double> ContributionMatrix::ClassTotals() const {
  std::map<std::string, double> totals;
  for (const auto &[stratum, classes] : cells_)
    for (const auto &[class_id, cell] : classes) totals[class_id] += cell.weight;
  return totals;
}

double ContributionMatrix::GrandTotal() const {
  double total = 0.0;
  for (const auto &[stratum, a] : stratum_totals_) total += a;
  return total;
}

ContributionMatrix ContributionMatrix::Merge(const ContributionMatrix &other) const {
  if (weights_overridden_ || other.weights_overridden_)
    throw Error(ErrorCode::kNotMergeable, "matrix weights were overridden");
  if (empty() && all_contributors_.empty()) return other;
  if (other.empty() && other.all_contributors_.empty()) return *this;
  if (num_categories_ != other.num_categories_ || !(weighting_ == other.weighting_))
    throw Error(ErrorCode::kNotMergeable, "schema arity or weighting differs");

  Builder builder(num_categories_);
  for (const ContributionMatrix *m : {this, &other})
    for (const auto &[stratum, classes] : m->cells_)
      for (const auto &[class_id, cell] : classes)
        for (const auto &[contributor, n] : cell.items_by_contributor)
          builder.Add(contributor, class_id, stratum, n);
  ContributionMatrix merged = std::move(builder).Build(weighting_);
  // Contributor sets can include strata whose cells were filtered out.
  for (const ContributionMatrix *m : {this, &other})
    for (const auto &[stratum, ids] : m->stratum_contributors_) {
      merged.stratum_contributors_[stratum].insert(ids.begin(), ids.end());
      merged.all_contributors_.insert(ids.begin(), ids.end());
    }
  return merged;
}

ContributionMatrix ContributionMatrix::Filtered(
    const std::function<bool(const Stratum &, const std::string &, const Cell &)> &keep) const {
  ContributionMatrix out = *this;
  for (auto s = out.cells_.begin(); s != out.cells_.end();) {
    for (auto c = s->second.begin(); c != s->second.end();) {
      if (keep(s->first, c->first, c->second))
        ++c;
      else
        c = s->second.erase(c);
    }
    if (s->second.empty())
      s = out.cells_.erase(s);
    else
      ++s;
  }
  out.RecomputeTotals();
  return out;
}

ContributionMatrix ContributionMatrix::WithWeights(
    const std::function<double(const Stratum &, const std::string &, const Cell &)> &weight)
    const {
  ContributionMatrix out = *this;
  for (auto &[stratum, classes] : out.cells_)
    for (auto &[class_id, cell] : classes) cell.weight = weight(stratum, class_id, cell);
  out.weights_overridden_ = true;
  out.RecomputeTotals();
  return out;
}

// --------------------------------------------------------- PopulationTable

PopulationTable::PopulationTable(size_t num_categories,
                                 std::map<Stratum, std::uint64_t> entries,
                                 std::uint64_t world_total)
    : num_categories_(num_categories), entries_(std::move(entries)), world_total_(world_total) {
  if (world_total_ == 0) throw Error(ErrorCode::kMissingWorldTotal, "N_W must be positive");
  std::vector<std::uint64_t> single_marginal_sum(num_categories_, 0);
  for (const auto &[stratum, n] : entries_) {
    if (stratum.size() != num_categories_)
      throw Error(ErrorCode::kParse, "population stratum arity mismatch");
    if (n > world_total_)
      throw Error(ErrorCode::kInconsistentPopulation, "entry exceeds world total");
    if (stratum.NumWildcards() + 1 == num_categories_) {
      for (size_t i = 0; i < num_categories_; ++i)
        if (stratum[i] != kWildcard) single_marginal_sum[i] += n;
    }
  }
  for (size_t i = 0; i < num_categories_; ++i)
    if (single_marginal_sum[i] > world_total_)
      throw Error(ErrorCode::kInconsistentPopulation,
                  "marginals of category " + std::to_string(i) + " exceed world total");
}

std::optional<std::uint64_t> PopulationTable::Find(const Stratum &stratum) const {
  auto it = entries_.find(stratum);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint64_t> PopulationTable::Population(const Stratum &pattern) const {
  if (auto exact = Find(pattern)) return exact;
  if (pattern.NumWildcards() == pattern.size() && pattern.size() > 0) return world_total_;
  std::optional<std::uint64_t> sum;
  for (const auto &[stratum, n] : entries_)
    if (stratum.IsFull() && pattern.Covers(stratum)) sum = sum.value_or(0) + n;
  return sum;
}

// ------------------------------------------------------------------ priors

const char *PriorSourceName(PriorSource source) {
  switch (source) {
    case PriorSource::kCensus: return "census";
    case PriorSource::kFallbackContributor: return "fallback-contributor";
    case PriorSource::kProductOfMarginals: return "product-of-marginals";
  }
  return "unknown";
}

double PriorVector::Sum() const {
  double s = 0.0;
  for (const auto &[stratum, e] : entries) s += e.probability;
  return s;
}

double PriorVector::At(const Stratum &stratum) const {
  auto it = entries.find(stratum);
  return it == entries.end() ? 0.0 : it->second.probability;
}

// ------------------------------------------------------------------- boost

const char *BoostFunctionName(BoostFunction f) {
  switch (f) {
    case BoostFunction::kIdentity: return "identity";
    case BoostFunction::kSqrt: return "sqrt";
    case BoostFunction::kLog1p: return "log1p";
  }
  return "unknown";
}

BoostFunction ParseBoostFunction(std::string_view name) {
  if (name == "identity") return BoostFunction::kIdentity;
  if (name == "sqrt") return BoostFunction::kSqrt;
  if (name == "log1p" || name == "log") return BoostFunction::kLog1p;
  throw Error(ErrorCode::kInvalidBoost, "unknown boost function '" + std::string(name) + "'");
}

double ApplyBoostFunction(BoostFunction f, double x) {
  switch (f) {
    case BoostFunction::kIdentity: return x;
    case BoostFunction::kSqrt: return std::sqrt(x);
    case BoostFunction::kLog1p: return std::log1p(x);
  }
  return x;
}

bool BoostConfig::IsIdentity() const {
  return std::all_of(categories.begin(), categories.end(), [](const auto &kv) {
    return kv.second.function == BoostFunction::kIdentity;
  });
}

std::string BoostConfig::Describe() const {
  std::string out = mode == Mode::kJoint ? "joint" : "independent";
  for (const auto &[name, cb] : categories) {
    if (cb.function == BoostFunction::kIdentity) continue;
    out += ";" + name + "=" + BoostFunctionName(cb.function) + "@" + std::to_string(cb.level);
  }
  return out;
}

// ------------------------------------------------------------------ scores

std::vector<std::pair<std::string, double>> CanonicalRanking(
    const std::map<std::string, double> &scores) {
  std::vector<std::pair<std::string, double>> out(scores.begin(), scores.end());
  // std::map iteration already orders ids, so a stable sort on score alone
  // yields the class_id tie-break.
  std::stable_sort(out.begin(), out.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  return out;
}

std::vector<std::pair<std::string, double>> RelevanceScores::Ranked() const {
  return CanonicalRanking(score);
}

double RelevanceScores::Sum() const {
  double s = 0.0;
  for (const auto &[id, v] : score) s += v;
  return s;
}

}  // namespace fairrel
