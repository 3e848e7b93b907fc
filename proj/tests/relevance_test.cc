// fairrel/tests/relevance_test.cc

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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fairrel/priors.h"
#include "fairrel/relevance.h"
#include "test_util.h"

using namespace fairrel;
using namespace fairrel::testing;

namespace {

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

const WeightingConfig kLinear{WeightingConfig::Kind::kLinear};

DemographicSchema Geo() {
  return SchemaFromText(
      "category country\nlevels country continent\n"
      "value A\nvalue B\nvalue C\nparent A X\nparent B X\nparent C Y\n");
}

PopulationTable GeoPopulation() {
  return PopulationTable(1, {{Stratum({0}), 100}, {Stratum({1}), 300}, {Stratum({2}), 600}},
                         1000);
}

}  // namespace

TEST_CASE("two-stratum hand example") {
  // P(c1|A) = 0.5, P(c1|B) = 0.25, P(A) = 0.6, P(B) = 0.4 -> U(c1) = 0.4.
  const DemographicSchema schema = FlatSchema("g", {"A", "B"});
  std::vector<ContributionRecord> records = {Record("u1", "c1", 1, {0}), Record("u2", "c2", 1, {0}),
                                             Record("u3", "c1", 1, {1}), Record("u4", "c2", 3, {1})};
  PopulationTable pop(1, {{Stratum({0}), 60}, {Stratum({1}), 40}}, 100);
  ScoringOptions options;
  options.weighting = kLinear;
  const ScoringResult r = ScorePipeline(records, pop, schema, options);
  CHECK(r.stratified.score.at("c1") == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(r.stratified.score.at("c2") == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(r.unstratified.score.at("c1") == doctest::Approx(2.0 / 6.0).epsilon(1e-14));
  CHECK(r.coverage.covered_prior_mass == doctest::Approx(1.0));
}

TEST_CASE("single stratum scores equal contribution shares") {
  const DemographicSchema schema = FlatSchema("g", {"A"});
  std::vector<ContributionRecord> records = {Record("u1", "c1", 5, {0}), Record("u2", "c2", 70, {0}),
                                             Record("u3", "c1", 2000, {0})};
  PopulationTable pop(1, {{Stratum({0}), 7}}, 7);
  const ScoringResult r = ScorePipeline(records, pop, schema, ScoringOptions{});
  for (const auto &[id, s] : r.unstratified.score)
    CHECK(std::fabs(r.stratified.score.at(id) - s) <= 1e-15);
}

TEST_CASE("aggregation does not depend on thread count") {
  std::mt19937_64 gen(5);
  const DemographicSchema schema = GenderRegionSchema();
  std::vector<ContributionRecord> records;
  for (int i = 0; i < 3000; ++i)
    records.push_back(Record("u" + std::to_string(gen() % 300), "c" + std::to_string(gen() % 40),
                             1 + gen() % 3000,
                             {static_cast<ValueId>(gen() % 3), static_cast<ValueId>(gen() % 3)}));
  const ContributionMatrix one = Aggregate(records, schema, WeightingConfig{}, 1);
  for (unsigned t : {2u, 3u, 8u}) CHECK(Aggregate(records, schema, WeightingConfig{}, t) == one);
  std::vector<ContributionRecord> bad = {Record("u", "c", 1, {kUnspecified, 0})};
  CHECK(CodeOf([&] { Aggregate(bad, schema, WeightingConfig{}); }) ==
        ErrorCode::kUnresolvedUnspecified);
}

TEST_CASE("boost factors pool populations at the chosen level") {
  const DemographicSchema schema = Geo();
  const PopulationTable pop = GeoPopulation();
  const std::vector<Stratum> strata = schema.FullStrata(true);
  BoostConfig sqrt_country;
  sqrt_country.categories["country"] = {BoostFunction::kSqrt, 0};
  auto a = BoostFactors(pop, schema, sqrt_country, strata);
  CHECK(a.at(Stratum({0})) == doctest::Approx(1.0 / std::sqrt(100.0)));
  CHECK(a.at(Stratum({2})) == doctest::Approx(1.0 / std::sqrt(600.0)));
  BoostConfig sqrt_continent;
  sqrt_continent.categories["country"] = {BoostFunction::kSqrt, 1};
  a = BoostFactors(pop, schema, sqrt_continent, strata);
  CHECK(a.at(Stratum({0})) == doctest::Approx(1.0 / std::sqrt(400.0)));
  CHECK(a.at(Stratum({1})) == a.at(Stratum({0})));
  BoostConfig identity;
  for (const auto &[h, alpha] : BoostFactors(pop, schema, identity, strata)) CHECK(alpha == 1.0);
  BoostConfig bad_level;
  bad_level.categories["country"] = {BoostFunction::kLog1p, 2};
  CHECK(CodeOf([&] { BoostFactors(pop, schema, bad_level, strata); }) == ErrorCode::kInvalidBoost);
  PopulationTable zero(1, {{Stratum({0}), 0}, {Stratum({1}), 300}, {Stratum({2}), 600}}, 1000);
  CHECK(CodeOf([&] { BoostFactors(zero, schema, sqrt_country, strata); }) ==
        ErrorCode::kZeroPopulationAtBoostLevel);
}

TEST_CASE("linear boost is level independent") {
  // With f = identity, alpha = 1 whatever the level, so scores match exactly.
  const DemographicSchema schema = Geo();
  std::vector<ContributionRecord> records = {Record("u1", "c1", 3, {0}), Record("u2", "c2", 1, {1}),
                                             Record("u3", "c3", 2, {2}), Record("u4", "c1", 2, {2})};
  ScoringOptions a, b;
  a.boost.categories["country"] = {BoostFunction::kIdentity, 0};
  b.boost.categories["country"] = {BoostFunction::kIdentity, 1};
  const auto ra = ScorePipeline(records, GeoPopulation(), schema, a);
  const auto rb = ScorePipeline(records, GeoPopulation(), schema, b);
  CHECK(ra.stratified.score == rb.stratified.score);
  ScoringOptions c;
  c.boost.categories["country"] = {BoostFunction::kSqrt, 0};
  const auto rc = ScorePipeline(records, GeoPopulation(), schema, c);
  ScoringOptions d;
  d.boost.categories["country"] = {BoostFunction::kSqrt, 1};
  const auto rd = ScorePipeline(records, GeoPopulation(), schema, d);
  CHECK(rc.stratified.score != rd.stratified.score);
}

TEST_CASE("joint mode boosts one category, independent mode multiplies") {
  const DemographicSchema schema = SchemaFromText(
      "category g\nvalue F\nvalue M\ncategory r\nvalue A\nvalue B\n");
  PopulationTable pop(2,
                      {{Stratum({0, kWildcard}), 40}, {Stratum({1, kWildcard}), 60},
                       {Stratum({kWildcard, 0}), 10}, {Stratum({kWildcard, 1}), 90}},
                      100);
  const std::vector<Stratum> strata = schema.FullStrata(true);
  BoostConfig both;
  both.categories["g"] = {BoostFunction::kSqrt, 0};
  both.categories["r"] = {BoostFunction::kSqrt, 0};
  CHECK(CodeOf([&] { BoostFactors(pop, schema, both, strata); }) == ErrorCode::kInvalidBoost);
  both.mode = BoostConfig::Mode::kIndependent;
  const auto alphas = BoostFactors(pop, schema, both, strata);
  CHECK(alphas.at(Stratum({0, 0})) ==
        doctest::Approx(1.0 / std::sqrt(40.0) / std::sqrt(10.0)).epsilon(1e-14));
}

TEST_CASE("utility algebra on random instances") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DemographicSchema schema = GenderRegionSchema();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ContributionRecord> records;
    for (int i = 0; i < 100; ++i)
      records.push_back(Record("u" + std::to_string(gen() % 50), "c" + std::to_string(gen() % 12),
                               1 + gen() % 100,
                               {static_cast<ValueId>(gen() % 3), static_cast<ValueId>(gen() % 3)}));
    const ContributionMatrix m = Aggregate(records, schema, WeightingConfig{});
    const ConditionalTable cond = Conditional(m);
    PriorVector prior;
    for (const auto &[h, row] : cond) prior.entries[h] = PriorEntry{u(gen), PriorSource::kCensus};
    std::map<Stratum, double> alphas;
    for (const auto &[h, e] : prior.entries) alphas[h] = 0.1 + u(gen);

    const RelevanceScores base = Utility(cond, prior, alphas);
    const double scale = 0.5 + 4.0 * u(gen);
    std::map<Stratum, double> scaled = alphas;
    for (auto &[h, a] : scaled) a *= scale;
    const RelevanceScores big = Utility(cond, prior, scaled);
    for (const auto &[id, s] : base.raw_utility)
      CHECK(std::fabs(big.raw_utility.at(id) - scale * s) <= 1e-12 * std::max(1.0, scale * s));
    const auto r1 = Normalize(base).Ranked(), r2 = Normalize(big).Ranked();
    for (size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].first == r2[i].first);

    const RelevanceScores naive = Normalize(Utility(cond, EmpiricalPrior(m), {}));
    const RelevanceScores unstrat = UnstratifiedScores(m);
    for (const auto &[id, s] : unstrat.score) CHECK(std::fabs(naive.score.at(id) - s) <= 1e-12);
    CHECK(std::fabs(Normalize(base).Sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("unspecified own-group records score through the fallback prior") {
  const DemographicSchema schema = FlatSchema("g", {"A", "B"});
  std::vector<ContributionRecord> records = {Record("u1", "c1", 1, {0}), Record("u2", "c2", 1, {1}),
                                             Record("u3", "c3", 1, {kUnspecified}),
                                             Record("u4", "c1", 1, {1})};
  PopulationTable pop(1, {{Stratum({0}), 50}, {Stratum({1}), 50}}, 100);
  ScoringOptions options;
  options.policy.unspecified["g"] = UnspecifiedPolicy::kOwnGroup;
  const ScoringResult r = ScorePipeline(records, pop, schema, options);
  CHECK(r.prior.At(Stratum({2})) == doctest::Approx(0.25));
  CHECK(r.stratified.score.at("c3") == doctest::Approx(0.25));
  ScoringOptions drop;
  const ScoringResult d = ScorePipeline(records, pop, schema, drop);
  CHECK(d.dropped_records == 1);
  CHECK(d.stratified.score.count("c3") == 0);
}

TEST_CASE("normalization and score files") {
  RelevanceScores empty;
  empty.raw_utility = {{"a", 0.0}};
  empty.score = empty.raw_utility;
  CHECK(CodeOf([&] { Normalize(empty); }) == ErrorCode::kEmptyTable);
  RelevanceScores s;
  s.raw_utility = {{"a", 0.1}, {"b", 0.3}, {"c\"x,y", 0.6}};
  s.score = s.raw_utility;
  s = Normalize(s);
  std::istringstream in(FormatScores(s));
  const RelevanceScores back = ParseScores(in);
  CHECK(back.score == s.score);
  CHECK(back.normalized);
  std::istringstream dup("class_id,score\na,0.5\na,0.5\n");
  CHECK(CodeOf([&] { ParseScores(dup); }) == ErrorCode::kDuplicateValue);
  std::istringstream neg("class_id,score\na,-0.5\n");
  CHECK(CodeOf([&] { ParseScores(neg); }) == ErrorCode::kMalformedRow);
}
