// src/io/ctm.cc
//
// Copyright 2026 The rnntk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rnntk/io/ctm.h"

#include <cstdlib>
#include <sstream>

#include "rnntk/errors.h"
#include "rnntk/io/file_util.h"

namespace rnntk {

namespace {

double ParseNumber(const std::string &field, const std::string &where) {
  char *end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    Fail(ErrorKind::kData, where + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

std::vector<CtmRow> ParseCtm(const std::string &text, const std::string &what) {
  std::vector<CtmRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty() || f[0][0] == '#') continue;
    const std::string where = what + ":" + std::to_string(lineno);
    if (f.size() != 5) Fail(ErrorKind::kData, where + ": expected 5 fields");
    CtmRow row;
    row.utt_id = f[0];
    row.channel = static_cast<int>(ParseNumber(f[1], where));
    row.start = ParseNumber(f[2], where);
    row.duration = ParseNumber(f[3], where);
    row.unit = f[4];
    row.line = lineno;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CtmRow> ReadCtm(const std::filesystem::path &path) {
  return ParseCtm(ReadFileBytes(path), path.string());
}

std::string FormatCtm(const std::vector<CtmRow> &rows, int decimals) {
  std::string out;
  for (const CtmRow &r : rows) {
    out += r.utt_id + " " + std::to_string(r.channel) + " " + FormatFixed(r.start, decimals) +
           " " + FormatFixed(r.duration, decimals) + " " + r.unit + "\n";
  }
  return out;
}

void WriteCtm(const std::filesystem::path &path, const std::vector<CtmRow> &rows,
              int decimals) {
  WriteFileAtomic(path, FormatCtm(rows, decimals));
}

}  // namespace rnntk
