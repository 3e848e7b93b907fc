// fairrel/io.h

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

#ifndef FAIRREL_IO_H_
#define FAIRREL_IO_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fairrel {

// A parsed CSV file.  Quoted fields may contain commas and doubled quotes but
// not newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<size_t> line_numbers;  // 1-based source line of each row

  // Column index by name, or -1.
  int Column(std::string_view name) const;
};

std::vector<std::string> SplitCsvLine(std::string_view line);
CsvTable ReadCsv(std::istream &in);
CsvTable ReadCsvFile(const std::string &path);

std::string CsvEscape(std::string_view field);
// Shortest form that round-trips, capped at 17 significant digits.
std::string FormatReal(double value);

std::string ReadTextFile(const std::string &path);
void WriteTextFile(const std::string &path, std::string_view content);

std::string Sha256Hex(std::string_view data);
std::string FileSha256(const std::string &path);

}  // namespace fairrel

#endif  // FAIRREL_IO_H_
