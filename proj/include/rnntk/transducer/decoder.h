// include/rnntk/transducer/decoder.h
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

#ifndef RNNTK_TRANSDUCER_DECODER_H_
#define RNNTK_TRANSDUCER_DECODER_H_

#include <string>
#include <vector>

#include "rnntk/transducer/model.h"

namespace rnntk {

// A decoded token sequence with the per-piece quantities the confidence
// features are built from. All per-token vectors are parallel to `tokens`.
struct Hypothesis {
  std::vector<TokenId> tokens;
  double log_prob = 0.0;            // total log posterior incl. blanks
  std::vector<int> emit_frames;     // 0-based frame of each piece
  std::vector<double> wp_log_probs;
  std::vector<double> hyp_log_probs;  // partial-hypothesis score after each piece
  std::vector<double> neg_entropies;
  std::vector<int> emitted_counts;    // pieces + blanks emitted up to each piece
  int emitted_count = 0;              // pieces + blanks over the utterance

  bool operator==(const Hypothesis &) const = default;
};

struct NBestList {
  std::string utt_id;
  std::vector<Hypothesis> hyps;  // descending log_prob
};

struct DecodeOptions {
  int max_symbols_per_frame = 3;
  std::size_t beam = 8;
  std::size_t nbest = 4;
  // Negative entropy over word pieces only (blank removed, renormalized) by
  // default; set to include the blank in the distribution.
  bool entropy_includes_blank = false;
};

Hypothesis GreedyDecode(const Sequence &features, const TransducerModel &model,
                        const DecodeOptions &options = {});

NBestList BeamSearch(const Sequence &features, const TransducerModel &model,
                     const DecodeOptions &options = {});

// Both decoders run on precomputed encoder output through this entry point
// too, which the oracle tests use to feed engineered models.
Hypothesis GreedyDecodeEncoded(const Sequence &h_enc, const TransducerModel &model,
                               const DecodeOptions &options);
NBestList BeamSearchEncoded(const Sequence &h_enc, const TransducerModel &model,
                            const DecodeOptions &options);

double PieceNegEntropy(std::span<const double> log_probs, TokenId blank, bool include_blank);

}  // namespace rnntk

#endif  // RNNTK_TRANSDUCER_DECODER_H_
