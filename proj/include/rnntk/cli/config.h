// include/rnntk/cli/config.h
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

#ifndef RNNTK_CLI_CONFIG_H_
#define RNNTK_CLI_CONFIG_H_

#include <cstddef>
#include <string>
#include <vector>

namespace rnntk {

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

// Flat `key = value` lines; '#' starts a comment. A key may appear once.
// Syntax errors are kConfig and name the line.
std::vector<ConfigEntry> ParseFlatConfig(const std::string &text,
                                         const std::string &what = "config");

}  // namespace rnntk

#endif  // RNNTK_CLI_CONFIG_H_
