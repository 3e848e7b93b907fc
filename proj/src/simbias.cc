// fairrel/simbias.cc

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

#include "fairrel/simbias.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "fairrel/io.h"
#include "fairrel/random.h"
#include "fairrel/reports.h"

namespace fairrel {

std::string Scenario::ClassId(size_t c) const {
  const size_t width = std::to_string(std::max<size_t>(NumClasses(), 1) - 1).size();
  std::string digits = std::to_string(c);
  return "c" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

void Scenario::Validate() const {
  auto fail = [](const std::string &m) { throw Error(ErrorCode::kInvalidScenario, m); };
  const size_t h = countries.size();
  if (h == 0) fail("no countries");
  if (continents.size() != h || population.size() != h || bias.size() != h ||
      preference.size() != h)
    fail("countries, continents, population, bias and preference rows must align");
  if (host.empty()) fail("no classes");
  double bias_sum = 0.0;
  for (size_t i = 0; i < h; ++i) {
    if (population[i] == 0) fail("population of " + countries[i] + " must be positive");
    if (!(bias[i] >= 0.0)) fail("negative bias");
    bias_sum += bias[i];
    if (preference[i].size() != host.size()) fail("preference row length != classes");
    double row = 0.0;
    for (double q : preference[i]) {
      if (!(q >= 0.0)) fail("negative preference");
      row += q;
    }
    if (std::fabs(row - 1.0) > 1e-9) fail("preference row of " + countries[i] + " must sum to 1");
  }
  if (std::fabs(bias_sum - 1.0) > 1e-9) fail("bias must sum to 1");
  for (size_t c : host)
    if (c >= h) fail("class host out of range");
  if (n_max < 1) fail("n_max must be >= 1");
}

DemographicSchema Scenario::Schema() const {
  Category cat;
  cat.name = "country";
  cat.values = countries;
  for (size_t i = 0; i < countries.size(); ++i) cat.parent[countries[i]] = continents[i];
  cat.level_names = {"country", "continent"};
  return DemographicSchema({cat});
}

void FillRotatedPreferences(Scenario *s, size_t num_classes, double common, size_t rotation) {
  if (num_classes == 0 || !(common >= 0.0 && common <= 1.0))
    throw Error(ErrorCode::kInvalidScenario, "bad rotated preference parameters");
  std::vector<double> z(num_classes);
  double harmonic = 0.0;
  for (size_t r = 0; r < num_classes; ++r) harmonic += 1.0 / static_cast<double>(r + 1);
  for (size_t r = 0; r < num_classes; ++r) z[r] = 1.0 / static_cast<double>(r + 1) / harmonic;

  const size_t h = s->countries.size();
  s->preference.assign(h, std::vector<double>(num_classes));
  for (size_t i = 0; i < h; ++i)
    for (size_t c = 0; c < num_classes; ++c)
      s->preference[i][c] =
          common * z[c] + (1.0 - common) * z[(c + rotation * i) % num_classes];

  s->host.assign(num_classes, 0);
  for (size_t c = 0; c < num_classes; ++c) {
    size_t best = 0;
    for (size_t i = 1; i < h; ++i)
      if ((c + rotation * i) % num_classes < (c + rotation * best) % num_classes) best = i;
    s->host[c] = best;
  }
}

Scenario DefaultScenario() {
  Scenario s;
  s.countries = {"A", "B", "C"};
  s.continents = {"X", "X", "Y"};
  s.population = {200000, 300000, 500000};
  s.bias = {0.7, 0.2, 0.1};
  FillRotatedPreferences(&s, 20, 0.5, 7);
  s.num_contributors = 5000;
  s.n_max = 2000;
  s.seed = 2021;
  return s;
}

Scenario NullBiasScenario() {
  Scenario s = DefaultScenario();
  s.bias = {0.2, 0.3, 0.5};
  return s;
}

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Trim(item));
  return out;
}

double ToReal(const std::string &key, const std::string &v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw Error(ErrorCode::kInvalidScenario, key + ": '" + v + "' is not a number");
  }
}

std::uint64_t ToCount(const std::string &key, const std::string &v) {
  double d = ToReal(key, v);
  if (d < 0 || std::floor(d) != d)
    throw Error(ErrorCode::kInvalidScenario, key + ": '" + v + "' is not a count");
  return static_cast<std::uint64_t>(d);
}

std::string JoinReals(const std::vector<double> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + FormatReal(v[i]);
  return out;
}

}  // namespace

Scenario ParseScenario(std::istream &in) {
  std::map<std::string, std::string> kv;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kInvalidScenario, "line " + std::to_string(lineno) + ": no '='");
    kv[Trim(line.substr(0, eq))] = Trim(line.substr(eq + 1));
  }
  auto take = [&](const std::string &key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string &key) {
    auto v = take(key);
    if (!v) throw Error(ErrorCode::kInvalidScenario, "missing key '" + key + "'");
    return *v;
  };

  Scenario s;
  s.countries = SplitList(require("countries"));
  if (auto c = take("continents"))
    s.continents = SplitList(*c);
  else
    s.continents.assign(s.countries.size(), "world");
  for (const auto &v : SplitList(require("population")))
    s.population.push_back(ToCount("population", v));
  for (const auto &v : SplitList(require("bias"))) s.bias.push_back(ToReal("bias", v));
  if (auto v = take("contributors")) s.num_contributors = ToCount("contributors", *v);
  if (auto v = take("n_max")) s.n_max = ToCount("n_max", *v);
  if (auto v = take("seed")) s.seed = ToCount("seed", *v);
  if (auto v = take("weighting")) {
    if (*v == "linear")
      s.weighting.kind = WeightingConfig::Kind::kLinear;
    else if (*v == "log")
      s.weighting.kind = WeightingConfig::Kind::kLogThreshold;
    else
      throw Error(ErrorCode::kInvalidScenario, "weighting must be linear or log");
  }
  if (auto v = take("n_cap")) s.weighting.n_cap = ToCount("n_cap", *v);

  const std::string mode = take("preference").value_or("rotated");
  if (mode == "rotated") {
    size_t classes = ToCount("classes", require("classes"));
    double common = 0.5;
    size_t rotation = 7;
    if (auto v = take("preference.common")) common = ToReal("preference.common", *v);
    if (auto v = take("preference.rotation")) rotation = ToCount("preference.rotation", *v);
    FillRotatedPreferences(&s, classes, common, rotation);
  } else if (mode == "explicit") {
    for (const auto &country : s.countries) {
      std::vector<double> row;
      for (const auto &v : SplitList(require("q." + country))) row.push_back(ToReal("q", v));
      s.preference.push_back(std::move(row));
    }
    for (const auto &code : SplitList(require("hosts"))) {
      auto it = std::find(s.countries.begin(), s.countries.end(), code);
      if (it == s.countries.end())
        throw Error(ErrorCode::kInvalidScenario, "host '" + code + "' is not a country");
      s.host.push_back(static_cast<size_t>(it - s.countries.begin()));
    }
    if (auto v = take("classes"); v && ToCount("classes", *v) != s.host.size())
      throw Error(ErrorCode::kInvalidScenario, "classes disagrees with hosts");
  } else {
    throw Error(ErrorCode::kInvalidScenario, "preference must be rotated or explicit");
  }
  if (!kv.empty()) throw Error(ErrorCode::kInvalidScenario, "unknown key '" + kv.begin()->first + "'");
  s.Validate();
  return s;
}

Scenario LoadScenario(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  try {
    return ParseScenario(in);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string FormatScenario(const Scenario &s) {
  std::ostringstream os;
  auto join = [](const std::vector<std::string> &v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
  };
  os << "countries = " << join(s.countries) << "\n";
  os << "continents = " << join(s.continents) << "\n";
  std::vector<std::string> pops;
  for (auto n : s.population) pops.push_back(std::to_string(n));
  os << "population = " << join(pops) << "\n";
  os << "bias = " << JoinReals(s.bias) << "\n";
  os << "contributors = " << s.num_contributors << "\n";
  os << "n_max = " << s.n_max << "\n";
  os << "seed = " << s.seed << "\n";
  os << "weighting = "
     << (s.weighting.kind == WeightingConfig::Kind::kLinear ? "linear" : "log") << "\n";
  os << "n_cap = " << s.weighting.n_cap << "\n";
  os << "preference = explicit\n";
  os << "classes = " << s.NumClasses() << "\n";
  for (size_t i = 0; i < s.countries.size(); ++i)
    os << "q." << s.countries[i] << " = " << JoinReals(s.preference[i]) << "\n";
  std::vector<std::string> hosts;
  for (size_t c : s.host) hosts.push_back(s.countries[c]);
  os << "hosts = " << join(hosts) << "\n";
  return os.str();
}

namespace {

std::vector<ContributionRecord> GenerateRange(const Scenario &s, size_t begin, size_t end) {
  const size_t width = std::to_string(std::max<size_t>(s.num_contributors, 1) - 1).size();
  const double log_span = std::log(static_cast<double>(s.n_max) + 1.0);
  std::vector<ContributionRecord> out;
  for (size_t u = begin; u < end; ++u) {
    Rng rng(DeriveSeed(s.seed, u));
    const size_t h = rng.Categorical(s.bias);
    double draw = std::floor(std::exp(rng.Uniform() * log_span));
    std::uint64_t n = static_cast<std::uint64_t>(
        std::clamp(draw, 1.0, static_cast<double>(s.n_max)));
    std::vector<std::uint64_t> counts = rng.Multinomial(n, s.preference[h]);
    std::string digits = std::to_string(u);
    std::string id = "u" + std::string(width - std::min(width, digits.size()), '0') + digits;
    for (size_t c = 0; c < counts.size(); ++c)
      if (counts[c] > 0)
        out.push_back(ContributionRecord{id, s.ClassId(c), counts[c],
                                         Stratum({static_cast<ValueId>(h)})});
  }
  return out;
}

}  // namespace

SimulatedWorld Generate(const Scenario &s, unsigned threads) {
  s.Validate();
  SimulatedWorld world;
  world.schema = s.Schema();

  threads = std::max(1u, threads);
  const size_t chunk = (s.num_contributors + threads - 1) / threads;
  std::vector<std::vector<ContributionRecord>> parts(threads);
  if (threads == 1) {
    parts[0] = GenerateRange(s, 0, s.num_contributors);
  } else {
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      size_t b = std::min(s.num_contributors, t * chunk);
      size_t e = std::min(s.num_contributors, b + chunk);
      workers.emplace_back([&, t, b, e] { parts[t] = GenerateRange(s, b, e); });
    }
    for (auto &w : workers) w.join();
  }
  for (auto &p : parts)
    world.records.insert(world.records.end(), std::make_move_iterator(p.begin()),
                         std::make_move_iterator(p.end()));

  std::map<Stratum, std::uint64_t> entries;
  std::uint64_t total = 0;
  for (size_t h = 0; h < s.countries.size(); ++h) {
    entries[Stratum({static_cast<ValueId>(h)})] = s.population[h];
    total += s.population[h];
  }
  world.population = PopulationTable(1, std::move(entries), total);

  for (size_t c = 0; c < s.NumClasses(); ++c)
    world.classes.classes[s.ClassId(c)] =
        ClassInfo{"Class " + std::to_string(c), s.countries[s.host[c]], s.continents[s.host[c]]};
  return world;
}

namespace {

RelevanceScores Mixture(const Scenario &s, const std::vector<double> &weights) {
  RelevanceScores out;
  for (size_t c = 0; c < s.NumClasses(); ++c) {
    double p = 0.0;
    for (size_t h = 0; h < s.countries.size(); ++h) p += s.preference[h][c] * weights[h];
    out.score[s.ClassId(c)] = p;
    out.raw_utility[s.ClassId(c)] = p;
  }
  out.normalized = true;
  return out;
}

}  // namespace

RelevanceScores TrueRelevance(const Scenario &s) {
  s.Validate();
  double total = 0.0;
  for (auto n : s.population) total += static_cast<double>(n);
  std::vector<double> shares;
  for (auto n : s.population) shares.push_back(static_cast<double>(n) / total);
  return Mixture(s, shares);
}

RelevanceScores UnstratifiedLimit(const Scenario &s) {
  s.Validate();
  return Mixture(s, s.bias);
}

EvaluationMetrics Evaluate(const RelevanceScores &estimated, const RelevanceScores &truth,
                           size_t k) {
  if (estimated.score.size() != truth.score.size() ||
      !std::equal(estimated.score.begin(), estimated.score.end(), truth.score.begin(),
                  [](const auto &a, const auto &b) { return a.first == b.first; }))
    throw Error(ErrorCode::kClassSetMismatch, "estimated and true scores cover different classes");

  EvaluationMetrics m;
  std::vector<double> e, t;
  for (const auto &[id, s] : estimated.score) e.push_back(s);
  for (const auto &[id, s] : truth.score) t.push_back(s);
  for (size_t i = 0; i < e.size(); ++i) {
    const double d = std::fabs(e[i] - t[i]);
    m.l1 += d;
    m.max_abs = std::max(m.max_abs, d);
  }
  if (!e.empty()) {
    OverlapResult o = OverlapAtK(estimated, truth, std::max<size_t>(k, 1));
    m.k = o.k_used;
    m.overlap_at_k = o.value;
  }
  auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
  size_t agree = 0, pairs = 0;
  for (size_t i = 0; i < e.size(); ++i)
    for (size_t j = i + 1; j < e.size(); ++j) {
      ++pairs;
      agree += sign(e[i] - e[j]) == sign(t[i] - t[j]);
    }
  m.pairwise_agreement = pairs ? static_cast<double>(agree) / static_cast<double>(pairs) : 1.0;
  return m;
}

}  // namespace fairrel
