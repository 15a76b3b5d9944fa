// include/rnntk/eval/edit_distance.h
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

#ifndef RNNTK_EVAL_EDIT_DISTANCE_H_
#define RNNTK_EVAL_EDIT_DISTANCE_H_

#include <string>
#include <vector>

namespace rnntk {

enum class EditOp { kMatch, kSubstitution, kInsertion, kDeletion };

// kInsertion: hyp word with no ref counterpart (ref_index = -1).
// kDeletion: ref word with no hyp counterpart (hyp_index = -1).
struct AlignedPair {
  EditOp op;
  int hyp_index;
  int ref_index;
};

// Unit-cost Levenshtein alignment of hyp against ref, in order. Backtrace
// prefers match, then substitution, then insertion, then deletion.
std::vector<AlignedPair> AlignWords(const std::vector<std::string> &hyp,
                                    const std::vector<std::string> &ref);

struct ErrorCounts {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t ref_words = 0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  // errors / ref_words; kEvaluation when ref_words is 0.
  double Wer() const;
  ErrorCounts &operator+=(const ErrorCounts &o);
};

ErrorCounts CountErrors(const std::vector<std::string> &hyp, const std::vector<std::string> &ref);

}  // namespace rnntk

#endif  // RNNTK_EVAL_EDIT_DISTANCE_H_
