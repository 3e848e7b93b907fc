// fairrel/config.cc

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

#include "fairrel/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fairrel {

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool StartsWith(const std::string &s, const std::string &prefix) {
  return s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

bool EndsWith(const std::string &s, const std::string &suffix) {
  return s.size() > suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Error Invalid(const std::string &key, const std::string &value, const std::string &why) {
  return Error(ErrorCode::kInvalidConfig, key + " = '" + value + "': " + why);
}

}  // namespace

const std::vector<std::pair<std::string, std::string>> &Config::StaticKeys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"seed", "seed for every randomized step (required where randomness is used)"},
      {"threads", "worker threads for aggregation and simulation"},
      {"ingest.strict", "treat rejected input rows as fatal (true|false)"},
      {"relevance.weighting", "per-contributor weight: log (thresholded) or linear"},
      {"relevance.n_cap", "upload count at which the log weight saturates"},
      {"relevance.log_base", "log base for the weight (default e)"},
      {"priors.join", "joint | product | conditional:<category>"},
      {"priors.fallback", "contributor-share priors for unavailable values (true|false)"},
      {"boost.mode", "joint | independent"},
      {"boost.level", "hierarchy level (name or depth) for boosted categories"},
      {"privacy.k", "minimum distinct contributors per published cell"},
      {"privacy.epsilon", "Laplace noise privacy budget (unset = no noise)"},
      {"privacy.sensitivity", "noise sensitivity (default: weight cap)"},
      {"privacy.noise_scope", "reports | scores"},
      {"privacy.suppress_scope", "reports | scores"},
      {"sampler.budget", "total number of samples to allocate"},
      {"sampler.mode", "multinomial | poisson"},
      {"report.n", "top-N size for rankings and region breakdowns"},
      {"report.k", "K for overlap@K"},
      {"report.grid", "comma-separated N values for the diversity curve"},
      {"report.level", "country | continent"},
      {"report.order", "relevance | contributions"},
  };
  return keys;
}

bool Config::IsKnownKey(const std::string &key) {
  for (const auto &[k, d] : StaticKeys())
    if (k == key) return true;
  if (StartsWith(key, "priors.unspecified.")) return true;
  if (StartsWith(key, "boost.")) {
    std::string rest = key.substr(6);
    if (EndsWith(rest, ".level")) rest = rest.substr(0, rest.size() - 6);
    return !rest.empty() && rest.find('.') == std::string::npos;
  }
  return false;
}

std::string Config::FlagForKey(const std::string &key) {
  std::string flag = key;
  std::replace(flag.begin(), flag.end(), '.', '-');
  return flag;
}

std::optional<std::string> Config::KeyForFlag(const std::string &flag) {
  for (const auto &[k, d] : StaticKeys())
    if (FlagForKey(k) == flag) return k;
  if (StartsWith(flag, "priors-unspecified-")) return "priors.unspecified." + flag.substr(19);
  if (StartsWith(flag, "boost-")) {
    std::string rest = flag.substr(6);
    if (EndsWith(rest, "-level")) return "boost." + rest.substr(0, rest.size() - 6) + ".level";
    return "boost." + rest;
  }
  return std::nullopt;
}

Config Config::Parse(std::istream &in) {
  Config config;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kInvalidConfig, "config line " + std::to_string(lineno) +
                                                 ": expected 'key = value'");
    config.Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  return config;
}

Config Config::Load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return Parse(in);
}

void Config::Set(const std::string &key, const std::string &value) {
  if (!IsKnownKey(key)) throw Error(ErrorCode::kInvalidConfig, "unknown key '" + key + "'");
  values_[key] = value;
}

void Config::Merge(const Config &overrides) {
  for (const auto &[k, v] : overrides.values_) values_[k] = v;
}

std::optional<std::string> Config::Get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::GetString(const std::string &key, const std::string &fallback) const {
  return Get(key).value_or(fallback);
}

std::uint64_t Config::GetCount(const std::string &key, std::uint64_t fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  if (v->empty() || v->find_first_not_of("0123456789") != std::string::npos)
    throw Invalid(key, *v, "expected a non-negative integer");
  try {
    return std::stoull(*v);
  } catch (const std::exception &) {
    throw Invalid(key, *v, "out of range");
  }
}

std::optional<double> Config::GetReal(const std::string &key) const {
  auto v = Get(key);
  if (!v) return std::nullopt;
  try {
    size_t pos = 0;
    double d = std::stod(*v, &pos);
    if (pos != v->size() || !std::isfinite(d)) throw std::invalid_argument(*v);
    return d;
  } catch (const std::exception &) {
    throw Invalid(key, *v, "expected a number");
  }
}

bool Config::GetBool(const std::string &key, bool fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw Invalid(key, *v, "expected true or false");
}

std::vector<size_t> Config::GetCountList(const std::string &key,
                                         const std::vector<size_t> &fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  std::vector<size_t> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw Invalid(key, *v, "expected comma-separated integers");
    out.push_back(std::stoul(item));
  }
  return out;
}

WeightingConfig WeightingFromConfig(const Config &config) {
  WeightingConfig w;
  const std::string kind = config.GetString("relevance.weighting", "log");
  if (kind == "log")
    w.kind = WeightingConfig::Kind::kLogThreshold;
  else if (kind == "linear")
    w.kind = WeightingConfig::Kind::kLinear;
  else
    throw Invalid("relevance.weighting", kind, "expected log or linear");
  w.n_cap = config.GetCount("relevance.n_cap", 1000);
  if (w.n_cap < 1) throw Invalid("relevance.n_cap", "0", "must be >= 1");
  if (auto base = config.GetReal("relevance.log_base")) {
    if (!(*base > 1.0)) throw Invalid("relevance.log_base", std::to_string(*base), "must be > 1");
    w.log_base = *base;
  }
  return w;
}

PriorPolicy PolicyFromConfig(const Config &config, const DemographicSchema &schema) {
  PriorPolicy policy;
  const std::string join = config.GetString("priors.join", "joint");
  if (join == "joint") {
    policy.join = PriorPolicy::Join::kJointIfAvailable;
  } else if (join == "product") {
    policy.join = PriorPolicy::Join::kProductOfMarginals;
  } else if (StartsWith(join, "conditional:")) {
    policy.join = PriorPolicy::Join::kConditional;
    policy.conditional_on = join.substr(12);
    if (!schema.FindCategory(policy.conditional_on))
      throw Invalid("priors.join", join, "unknown category");
  } else {
    throw Invalid("priors.join", join, "expected joint, product or conditional:<category>");
  }
  policy.fallback = config.GetBool("priors.fallback", true);
  for (const auto &[key, value] : config.values()) {
    if (!StartsWith(key, "priors.unspecified.")) continue;
    const std::string cat = key.substr(19);
    if (!schema.FindCategory(cat)) throw Invalid(key, value, "unknown category");
    if (value == "drop")
      policy.unspecified[cat] = UnspecifiedPolicy::kDrop;
    else if (value == "own-group")
      policy.unspecified[cat] = UnspecifiedPolicy::kOwnGroup;
    else
      throw Invalid(key, value, "expected drop or own-group");
  }
  return policy;
}

BoostConfig BoostFromConfig(const Config &config, const DemographicSchema &schema) {
  BoostConfig boost;
  const std::string mode = config.GetString("boost.mode", "joint");
  if (mode == "joint")
    boost.mode = BoostConfig::Mode::kJoint;
  else if (mode == "independent")
    boost.mode = BoostConfig::Mode::kIndependent;
  else
    throw Invalid("boost.mode", mode, "expected joint or independent");

  const auto shared_level = config.Get("boost.level");
  for (const auto &[key, value] : config.values()) {
    if (!StartsWith(key, "boost.") || key == "boost.mode" || key == "boost.level") continue;
    if (EndsWith(key, ".level")) continue;
    const std::string cat_name = key.substr(6);
    auto cat = schema.FindCategory(cat_name);
    if (!cat) throw Invalid(key, value, "unknown category");
    CategoryBoost cb;
    try {
      cb.function = ParseBoostFunction(value);
    } catch (const Error &) {
      throw Invalid(key, value, "expected identity, sqrt or log1p");
    }
    std::optional<std::string> level = config.Get(key + ".level");
    if (!level) level = shared_level;
    if (level) {
      auto depth = schema.FindLevel(*cat, *level);
      if (!depth) throw Invalid(key + ".level", *level, "no such level in " + cat_name);
      cb.level = *depth;
    }
    boost.categories[cat_name] = cb;
  }
  for (const auto &[key, value] : config.values())
    if (StartsWith(key, "boost.") && EndsWith(key, ".level") && key != "boost.level") {
      const std::string cat_name = key.substr(6, key.size() - 12);
      if (!boost.categories.count(cat_name))
        throw Invalid(key, value, "level set for a category without a boost function");
    }
  return boost;
}

PrivacyConfig PrivacyFromConfig(const Config &config) {
  PrivacyConfig p;
  p.k = config.GetCount("privacy.k", 10);
  p.epsilon = config.GetReal("privacy.epsilon");
  p.sensitivity = config.GetReal("privacy.sensitivity");
  auto scope = [&](const std::string &key) {
    const std::string v = config.GetString(key, "reports");
    if (v == "reports") return PrivacyConfig::Scope::kReports;
    if (v == "scores") return PrivacyConfig::Scope::kScores;
    throw Invalid(key, v, "expected reports or scores");
  };
  p.noise_scope = scope("privacy.noise_scope");
  p.suppress_scope = scope("privacy.suppress_scope");
  p.Validate();
  return p;
}

}  // namespace fairrel
