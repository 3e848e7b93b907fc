// fairrel/config.h

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

#ifndef FAIRREL_CONFIG_H_
#define FAIRREL_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairrel/core.h"
#include "fairrel/priors.h"
#include "fairrel/privacy.h"

namespace fairrel {

// Line-oriented `key = value` settings namespaced by module, e.g.
// `relevance.n_cap = 1000` or `boost.country = sqrt`.  Unknown keys are
// rejected so that typos fail loudly.
class Config {
 public:
  static Config Parse(std::istream &in);
  static Config Load(const std::string &path);

  // Static keys with a one-line description, in display order.
  static const std::vector<std::pair<std::string, std::string>> &StaticKeys();
  static bool IsKnownKey(const std::string &key);
  // "relevance.n_cap" -> "relevance-n_cap".
  static std::string FlagForKey(const std::string &key);
  // Inverse of FlagForKey, including the per-category boost/priors keys.
  static std::optional<std::string> KeyForFlag(const std::string &flag);

  void Set(const std::string &key, const std::string &value);
  void Merge(const Config &overrides);
  bool Has(const std::string &key) const { return values_.count(key) > 0; }
  std::optional<std::string> Get(const std::string &key) const;
  const std::map<std::string, std::string> &values() const { return values_; }

  std::string GetString(const std::string &key, const std::string &fallback) const;
  std::uint64_t GetCount(const std::string &key, std::uint64_t fallback) const;
  std::optional<double> GetReal(const std::string &key) const;
  bool GetBool(const std::string &key, bool fallback) const;
  std::vector<size_t> GetCountList(const std::string &key,
                                   const std::vector<size_t> &fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

WeightingConfig WeightingFromConfig(const Config &config);
PriorPolicy PolicyFromConfig(const Config &config, const DemographicSchema &schema);
BoostConfig BoostFromConfig(const Config &config, const DemographicSchema &schema);
PrivacyConfig PrivacyFromConfig(const Config &config);

}  // namespace fairrel

#endif  // FAIRREL_CONFIG_H_
