// src/eval/edit_distance.cc
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

#include "rnntk/eval/edit_distance.h"

#include <algorithm>

#include "rnntk/errors.h"

namespace rnntk {

std::vector<AlignedPair> AlignWords(const std::vector<std::string> &hyp,
                                    const std::vector<std::string> &ref) {
  const std::size_t H = hyp.size(), R = ref.size();
  std::vector<std::vector<std::size_t>> d(H + 1, std::vector<std::size_t>(R + 1, 0));
  for (std::size_t i = 0; i <= H; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= R; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= H; ++i) {
    for (std::size_t j = 1; j <= R; ++j) {
      const std::size_t diag = d[i - 1][j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      d[i][j] = std::min({diag, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  std::vector<AlignedPair> out;
  std::size_t i = H, j = R;
  while (i > 0 || j > 0) {
    const int hi = static_cast<int>(i) - 1, rj = static_cast<int>(j) - 1;
    if (i > 0 && j > 0 && hyp[i - 1] == ref[j - 1] && d[i][j] == d[i - 1][j - 1]) {
      out.push_back({EditOp::kMatch, hi, rj});
      --i, --j;
    } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
      out.push_back({EditOp::kSubstitution, hi, rj});
      --i, --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      out.push_back({EditOp::kInsertion, hi, -1});
      --i;
    } else {
      out.push_back({EditOp::kDeletion, -1, rj});
      --j;
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double ErrorCounts::Wer() const {
  Require(ref_words > 0, ErrorKind::kEvaluation, "WER undefined for an empty reference");
  return static_cast<double>(errors()) / static_cast<double>(ref_words);
}

ErrorCounts &ErrorCounts::operator+=(const ErrorCounts &o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  ref_words += o.ref_words;
  return *this;
}

ErrorCounts CountErrors(const std::vector<std::string> &hyp, const std::vector<std::string> &ref) {
  ErrorCounts c;
  c.ref_words = ref.size();
  for (const AlignedPair &p : AlignWords(hyp, ref)) {
    switch (p.op) {
      case EditOp::kMatch: break;
      case EditOp::kSubstitution: ++c.substitutions; break;
      case EditOp::kInsertion: ++c.insertions; break;
      case EditOp::kDeletion: ++c.deletions; break;
    }
  }
  return c;
}

}  // namespace rnntk
