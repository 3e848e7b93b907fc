// fairrel/tests/cli_test.cc

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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "fairrel/io.h"
#include "fairrel/relevance.h"

namespace fs = std::filesystem;
using fairrel::ReadTextFile;
using fairrel::WriteTextFile;

namespace {

const fs::path &Scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "fairrel_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int Run(const std::string &args) {
  const std::string cmd = std::string(FAIRREL_CLI) + " " + args + " >" +
                          (Scratch() / "stdout.txt").string() + " 2>" +
                          (Scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Dir(const std::string &name) { return (Scratch() / name).string(); }

std::string File(const std::string &dir, const std::string &name) {
  return (fs::path(Dir(dir)) / name).string();
}

nlohmann::json Json(const std::string &path) { return nlohmann::json::parse(ReadTextFile(path)); }

void ExpectSameTree(const std::string &a, const std::string &b) {
  size_t files = 0;
  for (const auto &entry : fs::directory_iterator(a)) {
    const fs::path other = fs::path(b) / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK_MESSAGE(ReadTextFile(entry.path().string()) == ReadTextFile(other.string()),
                  entry.path().filename().string());
    ++files;
  }
  CHECK(files == static_cast<size_t>(std::distance(fs::directory_iterator(b), {})));
}

}  // namespace

TEST_CASE("simulate then end2end on the default scenario") {
  REQUIRE(Run("simulate --seed 2021 --out-dir " + Dir("sim")) == 0);
  for (const char *f : {"schema.txt", "contributions.csv", "population.csv", "classes.csv",
                        "truth.csv", "scenario.txt", "manifest.json"})
    CHECK(fs::exists(File("sim", f)));
  REQUIRE(Run("end2end --scenario " + File("sim", "scenario.txt") + " --seed 2021 --out-dir " +
              Dir("e2e")) == 0);
  const nlohmann::json metrics = Json(File("e2e", "metrics.json"));
  CHECK(metrics["stratified"]["l1"].get<double>() < metrics["unstratified"]["l1"].get<double>());
  CHECK(ReadTextFile(File("sim", "contributions.csv")) ==
        ReadTextFile(File("e2e", "contributions.csv")));
  const nlohmann::json manifest = Json(File("e2e", "manifest.json"));
  CHECK(manifest["seed"] == 2021);
  CHECK(manifest["inputs"]["scenario"]["sha256"] ==
        fairrel::FileSha256(File("sim", "scenario.txt")));
  CHECK(manifest["outputs"]["metrics.json"] == fairrel::FileSha256(File("e2e", "metrics.json")));
}

TEST_CASE("end2end output is byte-identical across runs and thread counts") {
  REQUIRE(Run("end2end --seed 7 --out-dir " + Dir("d1")) == 0);
  REQUIRE(Run("end2end --seed 7 --out-dir " + Dir("d2")) == 0);
  REQUIRE(Run("end2end --seed 7 --threads 4 --out-dir " + Dir("d3")) == 0);
  ExpectSameTree(Dir("d1"), Dir("d2"));
  ExpectSameTree(Dir("d1"), Dir("d3"));
  REQUIRE(Run("end2end --seed 8 --out-dir " + Dir("d4")) == 0);
  CHECK(ReadTextFile(File("d1", "scores.csv")) != ReadTextFile(File("d4", "scores.csv")));
}

TEST_CASE("score with a single stratum equals contribution shares") {
  WriteTextFile(File("", "single_schema.txt"), "category g\nvalue A\n");
  WriteTextFile(File("", "single_contrib.csv"),
                "contributor_id,class_id,item_count,g\nu1,c1,5,A\nu2,c2,3,A\nu3,c1,40,A\n");
  WriteTextFile(File("", "single_pop.csv"), "g,population\n*,10\nA,10\n");
  REQUIRE(Run("score --schema " + File("", "single_schema.txt") + " --contributions " +
              File("", "single_contrib.csv") + " --population " + File("", "single_pop.csv") +
              " --out-dir " + Dir("single")) == 0);
  const auto strat = fairrel::LoadScores(File("single", "scores.csv"));
  const auto unstrat = fairrel::LoadScores(File("single", "unstratified_scores.csv"));
  for (const auto &[id, s] : unstrat.score) CHECK(std::fabs(strat.score.at(id) - s) <= 1e-15);
}

TEST_CASE("sample with a zero budget") {
  REQUIRE(Run("sample --scores " + File("single", "scores.csv") +
              " --budget 0 --seed 3 --out-dir " + Dir("zero")) == 0);
  std::istringstream rows(ReadTextFile(File("zero", "allocation.csv")));
  std::string line;
  std::getline(rows, line);
  CHECK(line == "class_id,expected,drawn");
  size_t n = 0;
  while (std::getline(rows, line)) {
    CHECK(line.substr(line.size() - 4) == ",0,0");
    ++n;
  }
  CHECK(n == 2);
  CHECK(Json(File("zero", "allocation.json"))["budget"] == 0);
}

TEST_CASE("exit codes") {
  CHECK(Run("end2end --out-dir " + Dir("x")) == 1);
  CHECK(Run("sample --scores " + File("single", "scores.csv") + " --budget 5 --out-dir " +
            Dir("x")) == 1);
  CHECK(Run("score --schema /nonexistent/schema.txt --contributions a --population b --out-dir " +
            Dir("x")) == 2);
  CHECK(Run("score --schema " + File("", "single_schema.txt") + " --contributions " +
            File("", "single_contrib.csv") + " --population " + File("", "single_pop.csv") +
            " --unstratified --boost-g sqrt --out-dir " + Dir("x")) == 1);
  CHECK(ReadTextFile(Dir("stderr.txt")).find("ConflictingOptions") != std::string::npos);
  CHECK(Run("aggregate --schema " + File("", "single_schema.txt") + " --contributions " +
            File("", "single_contrib.csv") + " --no-such-flag 1 --out-dir " + Dir("x")) == 1);
  CHECK(Run("frobnicate") == 1);
  CHECK(Run("--help") == 0);
}

TEST_CASE("flags override the config file") {
  WriteTextFile(File("", "run.conf"), "privacy.k = 3\nrelevance.weighting = linear\n");
  REQUIRE(Run("aggregate --config " + File("", "run.conf") + " --privacy-k 2 --schema " +
              File("", "single_schema.txt") + " --contributions " +
              File("", "single_contrib.csv") + " --out-dir " + Dir("agg")) == 0);
  const nlohmann::json manifest = Json(File("agg", "manifest.json"));
  CHECK(manifest["config"]["privacy.k"] == "2");
  CHECK(manifest["config"]["relevance.weighting"] == "linear");
  // c1 has two contributors and survives k = 2; c2 has one and does not.
  CHECK(ReadTextFile(File("agg", "matrix.csv")) ==
        "stratum,class_id,weight,contributors\ng=A,c1,45,2\n");
  CHECK(ReadTextFile(File("agg", "suppression_audit.csv")) == "stratum,suppressed_cells\ng=A,1\n");
}

TEST_CASE("report subcommand writes the digest-named files") {
  REQUIRE(Run("report --scores " + File("e2e", "scores.csv") + " --baseline " +
              File("e2e", "unstratified_scores.csv") + " --classes " + File("e2e", "classes.csv") +
              " --schema " + File("e2e", "schema.txt") + " --contributions " +
              File("e2e", "contributions.csv") +
              " --stratum 'country=A' --report-n 5 --out-dir " + Dir("rep")) == 0);
  size_t top = 0, overlap = 0, per_stratum = 0;
  for (const auto &entry : fs::directory_iterator(Dir("rep"))) {
    const std::string name = entry.path().filename().string();
    top += name.rfind("top_n-N5-", 0) == 0;
    overlap += name.rfind("overlap-K10-", 0) == 0;
    per_stratum += name.rfind("per_stratum-country_A-N5-", 0) == 0;
  }
  CHECK(top == 1);
  CHECK(overlap == 1);
  CHECK(per_stratum == 1);
}
