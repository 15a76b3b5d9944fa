// src/io/lexicon.cc
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

#include "rnntk/io/lexicon.h"

#include <sstream>

#include "rnntk/errors.h"
#include "rnntk/io/file_util.h"

namespace rnntk {

void Lexicon::Add(const std::string &word, std::vector<std::string> phones) {
  Require(!phones.empty(), ErrorKind::kLexicon, "empty pronunciation for '" + word + "'");
  entries_.emplace(word, std::move(phones));
}

const std::vector<std::string> &Lexicon::Pronunciation(const std::string &word) const {
  auto it = entries_.find(word);
  if (it == entries_.end()) Fail(ErrorKind::kLexicon, "no pronunciation for '" + word + "'");
  return it->second;
}

Lexicon Lexicon::Parse(const std::string &text, const std::string &what) {
  Lexicon lex;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> f = SplitWhitespace(line);
    if (f.empty() || f[0][0] == '#') continue;
    if (f.size() < 2) {
      Fail(ErrorKind::kLexicon,
           what + ":" + std::to_string(lineno) + ": empty pronunciation for '" + f[0] + "'");
    }
    lex.Add(f[0], std::vector<std::string>(f.begin() + 1, f.end()));
  }
  return lex;
}

Lexicon Lexicon::Read(const std::filesystem::path &path) {
  return Parse(ReadFileBytes(path), path.string());
}

std::string Lexicon::Format() const {
  std::string out;
  for (const auto &[word, phones] : entries_) {
    out += word;
    for (const std::string &p : phones) out += " " + p;
    out += "\n";
  }
  return out;
}

}  // namespace rnntk
