// include/rnntk/transducer/vocabulary.h
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

#ifndef RNNTK_TRANSDUCER_VOCABULARY_H_
#define RNNTK_TRANSDUCER_VOCABULARY_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rnntk {

using TokenId = int;

// U+2581, the sentencepiece word-start marker.
inline constexpr std::string_view kWordStart = "\xE2\x96\x81";
inline constexpr std::string_view kBlankSymbol = "<blank>";

struct WordGroup {
  std::string word;
  std::size_t first_token;  // index into the token list
  std::size_t last_token;
};

// Word-piece inventory with a blank symbol. Word-initial pieces carry the
// kWordStart prefix; continuation pieces do not.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `symbols` lists every output token including kBlankSymbol exactly once.
  explicit Vocabulary(std::vector<std::string> symbols);
  // Convenience: blank at id 0 followed by `pieces`.
  static Vocabulary WithBlank(std::vector<std::string> pieces);

  std::size_t size() const { return symbols_.size(); }
  TokenId blank_id() const { return blank_id_; }
  const std::string &Symbol(TokenId id) const;
  std::optional<TokenId> Find(std::string_view symbol) const;
  bool IsWordStart(TokenId id) const;
  const std::vector<std::string> &symbols() const { return symbols_; }

  // Greedy longest-match segmentation of each word into pieces.
  std::vector<TokenId> Tokenize(std::span<const std::string> words) const;
  // A leading continuation piece forms a word by itself. Blank is kTokenization.
  std::vector<WordGroup> GroupWords(std::span<const TokenId> ids) const;
  std::vector<std::string> ToWords(std::span<const TokenId> ids) const;

  bool operator==(const Vocabulary &other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, TokenId, std::less<>> index_;
  TokenId blank_id_ = 0;
};

}  // namespace rnntk

#endif  // RNNTK_TRANSDUCER_VOCABULARY_H_
