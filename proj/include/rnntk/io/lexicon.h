// include/rnntk/io/lexicon.h
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

#ifndef RNNTK_IO_LEXICON_H_
#define RNNTK_IO_LEXICON_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rnntk {

// word -> pronunciation. Only the first entry per word is kept.
class Lexicon {
 public:
  Lexicon() = default;

  // Throws kLexicon on an empty pronunciation.
  void Add(const std::string &word, std::vector<std::string> phones);
  bool Contains(const std::string &word) const { return entries_.count(word) > 0; }
  // Throws kLexicon naming the word when absent.
  const std::vector<std::string> &Pronunciation(const std::string &word) const;
  const std::map<std::string, std::vector<std::string>> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // `WORD ph1 ph2 ...` per line.
  static Lexicon Parse(const std::string &text, const std::string &what = "lexicon");
  static Lexicon Read(const std::filesystem::path &path);
  std::string Format() const;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

}  // namespace rnntk

#endif  // RNNTK_IO_LEXICON_H_
