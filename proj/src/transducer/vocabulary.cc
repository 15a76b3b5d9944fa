// src/transducer/vocabulary.cc
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

#include "rnntk/transducer/vocabulary.h"

#include "rnntk/errors.h"

namespace rnntk {

Vocabulary::Vocabulary(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  bool have_blank = false;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const std::string &s = symbols_[i];
    Require(!s.empty(), ErrorKind::kData, "empty vocabulary symbol");
    Require(index_.emplace(s, static_cast<TokenId>(i)).second, ErrorKind::kData,
            "duplicate vocabulary symbol '" + s + "'");
    if (s == kBlankSymbol) {
      have_blank = true;
      blank_id_ = static_cast<TokenId>(i);
    } else {
      Require(s != kWordStart, ErrorKind::kData, "bare word-start marker in vocabulary");
    }
  }
  Require(have_blank, ErrorKind::kData, "vocabulary has no blank symbol");
}

Vocabulary Vocabulary::WithBlank(std::vector<std::string> pieces) {
  pieces.insert(pieces.begin(), std::string(kBlankSymbol));
  return Vocabulary(std::move(pieces));
}

const std::string &Vocabulary::Symbol(TokenId id) const {
  Require(id >= 0 && static_cast<std::size_t>(id) < symbols_.size(), ErrorKind::kContract,
          "token id " + std::to_string(id) + " out of range");
  return symbols_[id];
}

std::optional<TokenId> Vocabulary::Find(std::string_view symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::IsWordStart(TokenId id) const {
  return id != blank_id_ && Symbol(id).starts_with(kWordStart);
}

std::vector<TokenId> Vocabulary::Tokenize(std::span<const std::string> words) const {
  std::vector<TokenId> out;
  for (const std::string &word : words) {
    std::size_t pos = 0;
    bool first = true;
    while (pos < word.size()) {
      TokenId best = -1;
      std::size_t best_len = 0;
      for (std::size_t len = word.size() - pos; len > 0; --len) {
        std::string cand = word.substr(pos, len);
        if (first) cand = std::string(kWordStart) + cand;
        if (auto id = Find(cand); id && *id != blank_id_) {
          best = *id;
          best_len = len;
          break;
        }
      }
      if (best < 0) {
        Fail(ErrorKind::kTokenization, "cannot segment word '" + word + "' into pieces");
      }
      out.push_back(best);
      pos += best_len;
      first = false;
    }
    Require(!first, ErrorKind::kTokenization, "empty word");
  }
  return out;
}

std::vector<WordGroup> Vocabulary::GroupWords(std::span<const TokenId> ids) const {
  std::vector<WordGroup> groups;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Require(ids[i] != blank_id_, ErrorKind::kTokenization, "blank inside token stream");
    const std::string &sym = Symbol(ids[i]);
    if (IsWordStart(ids[i])) {
      groups.push_back({sym.substr(kWordStart.size()), i, i});
    } else if (groups.empty()) {
      // Decoders may open with a continuation piece; it becomes a word.
      groups.push_back({sym, i, i});
    } else {
      groups.back().word += sym;
      groups.back().last_token = i;
    }
  }
  return groups;
}

std::vector<std::string> Vocabulary::ToWords(std::span<const TokenId> ids) const {
  std::vector<std::string> words;
  for (auto &g : GroupWords(ids)) words.push_back(std::move(g.word));
  return words;
}

}  // namespace rnntk
