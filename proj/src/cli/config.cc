// src/cli/config.cc
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

#include "rnntk/cli/config.h"

#include <set>

#include "rnntk/errors.h"

namespace rnntk {

namespace {

std::string Trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<ConfigEntry> ParseFlatConfig(const std::string &text, const std::string &what) {
  std::vector<ConfigEntry> entries;
  std::set<std::string> seen;
  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = what + " line " + std::to_string(lineno);
    const auto eq = line.find('=');
    Require(eq != std::string::npos, ErrorKind::kConfig, where + ": expected key = value");
    ConfigEntry e{Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), lineno};
    Require(!e.key.empty(), ErrorKind::kConfig, where + ": empty key");
    Require(e.key.find_first_of(" \t") == std::string::npos, ErrorKind::kConfig,
            where + ": key contains whitespace");
    Require(seen.insert(e.key).second, ErrorKind::kConfig, where + ": duplicate key " + e.key);
    if (e.value.size() >= 2 && e.value.front() == '"' && e.value.back() == '"') {
      e.value = e.value.substr(1, e.value.size() - 2);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace rnntk
