// fairrel/ingest.cc

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

#include "fairrel/ingest.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "fairrel/io.h"

namespace fairrel {

namespace {

std::vector<std::string> Tokens(const std::string &line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

template <typename T>
bool ParseInteger(const std::string &text, T *out) {
  const char *b = text.data();
  const char *e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, *out);
  return ec == std::errc() && ptr == e;
}

std::ifstream OpenOrThrow(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return in;
}

}  // namespace

DemographicSchema ParseSchema(std::istream &in) {
  std::vector<Category> cats;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<std::string> tok = Tokens(line);
    if (tok.empty()) continue;
    const std::string where = "schema line " + std::to_string(lineno);
    const std::string &kw = tok[0];
    if (kw == "category") {
      if (tok.size() != 2) throw Error(ErrorCode::kParse, where + ": expected 'category <name>'");
      cats.push_back(Category{});
      cats.back().name = tok[1];
      continue;
    }
    if (cats.empty()) throw Error(ErrorCode::kParse, where + ": directive before any category");
    Category &cat = cats.back();
    if (kw == "value" && tok.size() == 2) {
      cat.values.push_back(tok[1]);
    } else if (kw == "parent" && tok.size() == 3) {
      if (!cat.parent.emplace(tok[1], tok[2]).second)
        throw Error(ErrorCode::kDuplicateValue, where + ": second parent for '" + tok[1] + "'");
    } else if (kw == "unavailable" && tok.size() == 2) {
      cat.unavailable.insert(tok[1]);
    } else if (kw == "levels" && tok.size() >= 2) {
      cat.level_names.assign(tok.begin() + 1, tok.end());
    } else {
      throw Error(ErrorCode::kParse, where + ": cannot parse '" + line + "'");
    }
  }
  return DemographicSchema(std::move(cats));
}

DemographicSchema LoadSchema(const std::string &path) {
  std::ifstream in = OpenOrThrow(path);
  try {
    return ParseSchema(in);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string FormatSchema(const DemographicSchema &schema) {
  std::ostringstream os;
  for (const Category &cat : schema.categories()) {
    os << "category " << cat.name << "\n";
    if (!cat.level_names.empty()) {
      os << "levels";
      for (const auto &l : cat.level_names) os << " " << l;
      os << "\n";
    }
    for (const auto &v : cat.values) os << "value " << v << "\n";
    for (const auto &[child, parent] : cat.parent)
      os << "parent " << child << " " << parent << "\n";
    for (const auto &u : cat.unavailable) os << "unavailable " << u << "\n";
  }
  return os.str();
}

std::vector<ContributionRecord> ParseContributions(std::istream &in,
                                                   const DemographicSchema &schema,
                                                   IngestReport *report,
                                                   const IngestOptions &options) {
  CsvTable table = ReadCsv(in);
  const size_t k = schema.NumCategories();
  std::vector<std::string> expected = {"contributor_id", "class_id", "item_count"};
  for (const Category &c : schema.categories()) expected.push_back(c.name);
  for (size_t i = 0; i < expected.size(); ++i)
    if (i >= table.header.size() || table.header[i] != expected[i])
      throw Error(ErrorCode::kMissingColumn,
                  "contributions header must start with column '" + expected[i] + "' at position " +
                      std::to_string(i + 1));

  IngestReport local;
  IngestReport &rep = report ? *report : local;
  rep = IngestReport{};

  std::map<std::tuple<std::string, std::string, Stratum>, std::uint64_t> merged;
  auto reject = [&](ErrorCode code, size_t row, const std::string &detail) {
    if (options.strict)
      throw Error(code, "contributions line " + std::to_string(table.line_numbers[row]) + ": " +
                            detail);
    ++rep.rows_rejected;
    ++rep.rejected_by_reason[ErrorCodeName(code)];
  };

  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    ++rep.rows_read;
    if (row.size() != table.header.size()) {
      reject(ErrorCode::kMalformedRow, r, "wrong field count");
      continue;
    }
    if (row[0].empty() || row[1].empty()) {
      reject(ErrorCode::kMalformedRow, r, "empty contributor_id or class_id");
      continue;
    }
    long long count = 0;
    if (!ParseInteger(row[2], &count)) {
      reject(ErrorCode::kMalformedRow, r, "item_count '" + row[2] + "' is not an integer");
      continue;
    }
    if (count <= 0) {
      reject(ErrorCode::kNonPositiveCount, r, "item_count " + row[2]);
      continue;
    }
    std::vector<ValueId> values(k);
    bool ok = true;
    for (size_t i = 0; i < k && ok; ++i) {
      const std::string &code = row[3 + i];
      if (code.empty() || code == kUnspecifiedCode) {
        values[i] = kUnspecified;
      } else if (auto v = schema.FindValue(i, code)) {
        values[i] = *v;
      } else {
        reject(ErrorCode::kUnknownValue, r, schema.category(i).name + "=" + code);
        ok = false;
      }
    }
    if (!ok) continue;
    ++rep.rows_accepted;
    merged[{row[0], row[1], Stratum(std::move(values))}] += static_cast<std::uint64_t>(count);
  }

  std::vector<ContributionRecord> out;
  out.reserve(merged.size());
  std::set<std::string> contributors, classes;
  for (auto &[key, count] : merged) {
    const auto &[contributor, class_id, stratum] = key;
    contributors.insert(contributor);
    classes.insert(class_id);
    out.push_back(ContributionRecord{contributor, class_id, count, stratum});
  }
  rep.records = out.size();
  rep.distinct_contributors = contributors.size();
  rep.distinct_classes = classes.size();
  return out;
}

std::vector<ContributionRecord> LoadContributions(const std::string &path,
                                                  const DemographicSchema &schema,
                                                  IngestReport *report,
                                                  const IngestOptions &options) {
  std::ifstream in = OpenOrThrow(path);
  try {
    return ParseContributions(in, schema, report, options);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string FormatContributions(const std::vector<ContributionRecord> &records,
                                const DemographicSchema &schema) {
  std::ostringstream os;
  os << "contributor_id,class_id,item_count";
  for (const Category &c : schema.categories()) os << "," << c.name;
  os << "\n";
  for (const auto &rec : records) {
    os << CsvEscape(rec.contributor_id) << "," << CsvEscape(rec.class_id) << ","
       << rec.item_count;
    for (size_t i = 0; i < schema.NumCategories(); ++i) {
      os << ",";
      ValueId v = rec.demographics[i];
      if (v >= 0) os << schema.ValueCode(i, v);
    }
    os << "\n";
  }
  return os.str();
}

PopulationTable ParsePopulation(std::istream &in, const DemographicSchema &schema) {
  CsvTable table = ReadCsv(in);
  const size_t k = schema.NumCategories();
  for (size_t i = 0; i < k; ++i)
    if (i >= table.header.size() || table.header[i] != schema.category(i).name)
      throw Error(ErrorCode::kMissingColumn,
                  "population header must list category '" + schema.category(i).name +
                      "' at position " + std::to_string(i + 1));
  if (table.header.size() != k + 1 || table.header[k] != "population")
    throw Error(ErrorCode::kMissingColumn, "population header must end with 'population'");

  std::map<Stratum, std::uint64_t> entries;
  std::optional<std::uint64_t> world;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = "population line " + std::to_string(table.line_numbers[r]);
    if (row.size() != k + 1) throw Error(ErrorCode::kMalformedRow, where + ": wrong field count");
    std::vector<ValueId> values(k);
    for (size_t i = 0; i < k; ++i) {
      if (row[i] == kWildcardCode) {
        values[i] = kWildcard;
      } else if (auto v = schema.FindValue(i, row[i])) {
        values[i] = *v;
      } else {
        throw Error(ErrorCode::kUnknownValue,
                    where + ": " + schema.category(i).name + "=" + row[i]);
      }
    }
    long long n = 0;
    if (!ParseInteger(row[k], &n))
      throw Error(ErrorCode::kMalformedRow, where + ": population '" + row[k] + "'");
    if (n < 0) throw Error(ErrorCode::kNegativePopulation, where);
    Stratum s(std::move(values));
    if (s.NumWildcards() == k) {
      if (world) throw Error(ErrorCode::kDuplicateStratum, where + ": second world total");
      world = static_cast<std::uint64_t>(n);
      continue;
    }
    if (!entries.emplace(std::move(s), static_cast<std::uint64_t>(n)).second)
      throw Error(ErrorCode::kDuplicateStratum, where);
  }
  if (!world) throw Error(ErrorCode::kMissingWorldTotal, "no all-'*' row");
  return PopulationTable(k, std::move(entries), *world);
}

PopulationTable LoadPopulation(const std::string &path, const DemographicSchema &schema) {
  std::ifstream in = OpenOrThrow(path);
  try {
    return ParsePopulation(in, schema);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string FormatPopulation(const PopulationTable &table, const DemographicSchema &schema) {
  std::ostringstream os;
  for (const Category &c : schema.categories()) os << c.name << ",";
  os << "population\n";
  for (size_t i = 0; i < schema.NumCategories(); ++i) os << "*,";
  os << table.world_total() << "\n";
  for (const auto &[stratum, n] : table.entries()) {
    for (size_t i = 0; i < schema.NumCategories(); ++i)
      os << (stratum[i] == kWildcard ? std::string(kWildcardCode) : schema.ValueCode(i, stratum[i]))
         << ",";
    os << n << "\n";
  }
  return os.str();
}

ClassMetadata ParseClassMetadata(std::istream &in, const DemographicSchema *schema,
                                 const std::string &geo_category) {
  CsvTable table = ReadCsv(in);
  const int id_col = table.Column("class_id"), name_col = table.Column("name"),
            country_col = table.Column("country"), continent_col = table.Column("continent");
  for (auto [col, name] : {std::pair{id_col, "class_id"}, std::pair{name_col, "name"},
                           std::pair{country_col, "country"},
                           std::pair{continent_col, "continent"}})
    if (col < 0) throw Error(ErrorCode::kMissingColumn, std::string("classes.csv lacks '") + name + "'");

  std::optional<size_t> geo;
  if (schema) geo = schema->FindCategory(geo_category);

  ClassMetadata meta;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    if (row.size() != table.header.size() || row[id_col].empty()) {
      ++meta.rejected;
      continue;
    }
    ClassInfo info{row[name_col], row[country_col], row[continent_col]};
    if (geo) {
      auto v = schema->FindValue(*geo, info.country);
      if (!v) {
        ++meta.rejected;
        continue;
      }
      if (schema->NumLevels(*geo) > 1 && schema->Ancestor(*geo, *v, 1) != info.continent) {
        ++meta.rejected;
        continue;
      }
    }
    if (!meta.classes.emplace(row[id_col], std::move(info)).second) ++meta.rejected;
  }
  return meta;
}

ClassMetadata LoadClassMetadata(const std::string &path, const DemographicSchema *schema,
                                const std::string &geo_category) {
  std::ifstream in = OpenOrThrow(path);
  try {
    return ParseClassMetadata(in, schema, geo_category);
  } catch (const Error &e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

std::string FormatClassMetadata(const ClassMetadata &meta) {
  std::ostringstream os;
  os << "class_id,name,country,continent\n";
  for (const auto &[id, info] : meta.classes)
    os << CsvEscape(id) << "," << CsvEscape(info.name) << "," << CsvEscape(info.country) << ","
       << CsvEscape(info.continent) << "\n";
  return os.str();
}

}  // namespace fairrel
