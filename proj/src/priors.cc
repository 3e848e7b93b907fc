// fairrel/priors.cc

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

#include "fairrel/priors.h"

#include <algorithm>
#include <sstream>

#include "fairrel/io.h"

namespace fairrel {

UnspecifiedPolicy PriorPolicy::UnspecifiedFor(const std::string &category) const {
  auto it = unspecified.find(category);
  return it == unspecified.end() ? UnspecifiedPolicy::kDrop : it->second;
}

std::string PriorPolicy::Describe() const {
  std::string out;
  switch (join) {
    case Join::kJointIfAvailable: out = "joint"; break;
    case Join::kProductOfMarginals: out = "product"; break;
    case Join::kConditional: out = "conditional:" + conditional_on; break;
  }
  for (const auto &[cat, p] : unspecified)
    out += ";" + cat + "=" + (p == UnspecifiedPolicy::kDrop ? "drop" : "own-group");
  out += fallback ? ";fallback" : ";no-fallback";
  return out;
}

namespace {

// N_v for a single-category marginal, or nothing.
std::optional<std::uint64_t> MarginalPopulation(const PopulationTable &pop, size_t k,
                                                size_t category, ValueId value) {
  return pop.Population(Stratum::AllWildcard(k).With(category, value));
}

// Shares of each available value of `category`, normalized over available
// values.  Indexed by ValueId; unavailable values get 0.
std::vector<double> GlobalShares(const PopulationTable &pop, const DemographicSchema &schema,
                                 size_t category) {
  const size_t k = schema.NumCategories();
  std::vector<double> shares(schema.NumValues(category), 0.0);
  double total = 0.0;
  for (size_t v = 0; v < shares.size(); ++v) {
    ValueId id = static_cast<ValueId>(v);
    if (schema.IsUnavailable(category, id)) continue;
    auto n = MarginalPopulation(pop, k, category, id);
    if (!n)
      throw Error(ErrorCode::kMissingMarginal,
                  schema.category(category).name + "=" + schema.ValueCode(category, id));
    shares[v] = static_cast<double>(*n);
    total += shares[v];
  }
  if (total <= 0.0)
    throw Error(ErrorCode::kMissingMarginal,
                "all marginals of '" + schema.category(category).name + "' are zero");
  for (double &s : shares) s /= total;
  return shares;
}

PriorVector JointIfAvailable(const PopulationTable &pop, const DemographicSchema &schema) {
  const size_t k = schema.NumCategories();
  const double world = static_cast<double>(pop.world_total());
  std::map<Stratum, PriorEntry> raw;
  double total = 0.0;
  for (const Stratum &h : schema.FullStrata(false)) {
    PriorEntry e;
    if (auto n = pop.Find(h)) {
      e.probability = static_cast<double>(*n);
      e.source = PriorSource::kCensus;
    } else {
      double estimate = world;
      for (size_t i = 0; i < k; ++i) {
        auto n_i = MarginalPopulation(pop, k, i, h[i]);
        if (!n_i)
          throw Error(ErrorCode::kMissingMarginal,
                      "no joint row and no marginal for " + schema.EncodeStratum(h));
        estimate *= static_cast<double>(*n_i) / world;
      }
      e.probability = estimate;
      e.source = k == 1 ? PriorSource::kCensus : PriorSource::kProductOfMarginals;
    }
    total += e.probability;
    raw.emplace(h, e);
  }
  if (total <= 0.0) throw Error(ErrorCode::kEmptyTable, "covered population is zero");
  PriorVector prior;
  for (auto &[h, e] : raw) {
    e.probability /= total;
    prior.entries.emplace(h, e);
  }
  return prior;
}

PriorVector ProductOfMarginals(const PopulationTable &pop, const DemographicSchema &schema) {
  const size_t k = schema.NumCategories();
  std::vector<std::vector<double>> shares;
  for (size_t i = 0; i < k; ++i) shares.push_back(GlobalShares(pop, schema, i));
  PriorVector prior;
  for (const Stratum &h : schema.FullStrata(false)) {
    double p = 1.0;
    for (size_t i = 0; i < k; ++i) p *= shares[i][static_cast<size_t>(h[i])];
    prior.entries.emplace(h, PriorEntry{p, k == 1 ? PriorSource::kCensus
                                                  : PriorSource::kProductOfMarginals});
  }
  return prior;
}

PriorVector Conditional(const PopulationTable &pop, const DemographicSchema &schema,
                        const std::string &on, std::vector<std::string> *warnings) {
  const size_t k = schema.NumCategories();
  const size_t x_cat = schema.CategoryIndex(on);
  std::vector<double> x_share = GlobalShares(pop, schema, x_cat);

  // cond[i][x][v] = P(category i = v | x).
  std::vector<std::vector<std::vector<double>>> cond(k);
  for (size_t i = 0; i < k; ++i) {
    if (i == x_cat) continue;
    cond[i].resize(schema.NumValues(x_cat));
    std::optional<std::vector<double>> global;
    for (size_t x = 0; x < schema.NumValues(x_cat); ++x) {
      ValueId xid = static_cast<ValueId>(x);
      if (schema.IsUnavailable(x_cat, xid)) continue;
      std::vector<double> row(schema.NumValues(i), 0.0);
      double total = 0.0;
      bool complete = true;
      for (size_t v = 0; v < row.size() && complete; ++v) {
        ValueId vid = static_cast<ValueId>(v);
        if (schema.IsUnavailable(i, vid)) continue;
        auto n = pop.Population(Stratum::AllWildcard(k).With(i, vid).With(x_cat, xid));
        if (!n) {
          complete = false;
          break;
        }
        row[v] = static_cast<double>(*n);
        total += row[v];
      }
      if (complete && total > 0.0) {
        for (double &r : row) r /= total;
      } else {
        if (!global) global = GlobalShares(pop, schema, i);
        row = *global;
        if (warnings)
          warnings->push_back("no " + schema.category(i).name + " breakdown for " + on + "=" +
                              schema.ValueCode(x_cat, xid) + "; using global marginals");
      }
      cond[i][x] = std::move(row);
    }
  }

  PriorVector prior;
  for (const Stratum &h : schema.FullStrata(false)) {
    const size_t x = static_cast<size_t>(h[x_cat]);
    double p = x_share[x];
    for (size_t i = 0; i < k; ++i)
      if (i != x_cat) p *= cond[i][x][static_cast<size_t>(h[i])];
    prior.entries.emplace(h, PriorEntry{p, k == 1 ? PriorSource::kCensus
                                                  : PriorSource::kProductOfMarginals});
  }
  return prior;
}

}  // namespace

PriorVector CensusPrior(const PopulationTable &pop, const DemographicSchema &schema,
                        const PriorPolicy &policy, std::vector<std::string> *warnings) {
  if (pop.entries().empty()) throw Error(ErrorCode::kEmptyTable, "population table has no rows");
  if (schema.NumCategories() == 0) throw Error(ErrorCode::kEmptyTable, "schema has no categories");
  switch (policy.join) {
    case PriorPolicy::Join::kJointIfAvailable: return JointIfAvailable(pop, schema);
    case PriorPolicy::Join::kProductOfMarginals: return ProductOfMarginals(pop, schema);
    case PriorPolicy::Join::kConditional:
      return Conditional(pop, schema, policy.conditional_on, warnings);
  }
  return {};
}

PriorVector ApplyFallback(const PriorVector &prior, const ContributionMatrix &matrix,
                          const DemographicSchema &schema) {
  const size_t k = schema.NumCategories();
  std::vector<size_t> fallback_cats;
  for (size_t i = 0; i < k; ++i)
    if (schema.HasUnavailable(i)) fallback_cats.push_back(i);
  if (fallback_cats.empty() || prior.fallback_applied) return prior;

  const size_t m_w = matrix.TotalContributors();
  if (m_w == 0)
    throw Error(ErrorCode::kNoContributors,
                "population-unavailable values need contributor statistics");

  // share[i][v] = M_v / M_W for unavailable v; mass[i] = sum over those.
  std::vector<std::vector<double>> share(k);
  std::vector<double> mass(k, 0.0);
  for (size_t i : fallback_cats) {
    share[i].assign(schema.NumValues(i), 0.0);
    for (size_t v = 0; v < share[i].size(); ++v) {
      ValueId id = static_cast<ValueId>(v);
      if (!schema.IsUnavailable(i, id)) continue;
      share[i][v] = static_cast<double>(matrix.ValueContributors(i, id)) /
                    static_cast<double>(m_w);
      mass[i] += share[i][v];
    }
    // Contributors reporting several values can push the mass past 1.
    if (mass[i] > 1.0) {
      for (double &s : share[i]) s /= mass[i];
      mass[i] = 1.0;
    }
  }

  // Census marginals with every subset of the fallback categories summed out.
  const size_t subsets = size_t{1} << fallback_cats.size();
  std::map<Stratum, double> marginal;
  for (const auto &[h, e] : prior.entries) {
    for (size_t mask = 0; mask < subsets; ++mask) {
      Stratum pattern = h;
      for (size_t j = 0; j < fallback_cats.size(); ++j)
        if (mask & (size_t{1} << j)) pattern = pattern.With(fallback_cats[j], kWildcard);
      marginal[pattern] += e.probability;
    }
  }

  PriorVector out;
  out.fallback_applied = true;
  for (const Stratum &h : schema.FullStrata(true)) {
    double p = 1.0;
    Stratum pattern = h;
    bool any_unavailable = false;
    for (size_t i : fallback_cats) {
      if (schema.IsUnavailable(i, h[i])) {
        p *= share[i][static_cast<size_t>(h[i])];
        pattern = pattern.With(i, kWildcard);
        any_unavailable = true;
      } else {
        p *= 1.0 - mass[i];
      }
    }
    if (!any_unavailable) {
      auto it = prior.entries.find(h);
      if (it == prior.entries.end()) continue;
      out.entries.emplace(h, PriorEntry{it->second.probability * p, it->second.source});
      continue;
    }
    auto it = marginal.find(pattern);
    double base = it == marginal.end() ? 0.0 : it->second;
    out.entries.emplace(h, PriorEntry{base * p, PriorSource::kFallbackContributor});
  }
  return out;
}

std::string SyntheticUnspecifiedCode(const std::string &category) {
  return "__UNSPEC_" + category;
}

ResolvedRecords ResolveUnspecified(std::vector<ContributionRecord> records,
                                   const DemographicSchema &schema, const PriorPolicy &policy) {
  ResolvedRecords out;
  out.schema = schema;
  const size_t k = schema.NumCategories();
  std::vector<ValueId> synthetic(k, kUnspecified);
  for (size_t i = 0; i < k; ++i) {
    const std::string &name = schema.category(i).name;
    if (policy.UnspecifiedFor(name) != UnspecifiedPolicy::kOwnGroup) continue;
    bool used = std::any_of(records.begin(), records.end(), [&](const ContributionRecord &r) {
      return r.demographics[i] == kUnspecified;
    });
    if (!used) continue;
    synthetic[i] = static_cast<ValueId>(out.schema.NumValues(i));
    out.schema = out.schema.WithValue(i, SyntheticUnspecifiedCode(name), true);
  }

  const bool had_records = !records.empty();
  out.records.reserve(records.size());
  for (ContributionRecord &r : records) {
    std::vector<ValueId> values = r.demographics.values();
    bool drop = false;
    for (size_t i = 0; i < k; ++i) {
      if (values[i] != kUnspecified) continue;
      if (synthetic[i] != kUnspecified)
        values[i] = synthetic[i];
      else
        drop = true;
    }
    if (drop) {
      ++out.dropped;
      continue;
    }
    r.demographics = Stratum(std::move(values));
    out.records.push_back(std::move(r));
  }
  out.all_dropped = had_records && out.records.empty();
  return out;
}

std::string FormatPriors(const PriorVector &prior, const DemographicSchema &schema) {
  std::ostringstream os;
  os << "stratum,probability,provenance\n";
  for (const auto &[h, e] : prior.entries)
    os << schema.EncodeStratum(h) << "," << FormatReal(e.probability) << ","
       << PriorSourceName(e.source) << "\n";
  return os.str();
}

}  // namespace fairrel
