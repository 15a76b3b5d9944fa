// include/rnntk/timing/word_timing.h
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

#ifndef RNNTK_TIMING_WORD_TIMING_H_
#define RNNTK_TIMING_WORD_TIMING_H_

#include <optional>
#include <string>
#include <vector>

#include "rnntk/io/ctm.h"
#include "rnntk/io/lexicon.h"
#include "rnntk/numcore/matrix.h"
#include "rnntk/transducer/decoder.h"
#include "rnntk/transducer/vocabulary.h"

namespace rnntk {

struct WordSpan {
  std::string word;
  std::size_t first_phone;  // indices into PhoneSequence::phones
  std::size_t last_phone;

  bool operator==(const WordSpan &) const = default;
};

struct PhoneSequence {
  std::vector<int> phones;      // phone ids (column indices of the posteriorgram)
  std::vector<bool> optional;   // parallel to phones; true for skippable silence
  std::vector<WordSpan> words;

  std::size_t size() const { return phones.size(); }
  std::size_t MandatoryCount() const;
  bool operator==(const PhoneSequence &) const = default;
};

// First pronunciation of each word. With `silence` set, an optional slot of
// that phone goes at both ends and between words. Words or phones missing
// from the lexicon or phone set raise kLexicon naming them.
PhoneSequence ExpandToPhones(const std::vector<std::string> &words, const Lexicon &lexicon,
                             const std::vector<std::string> &phone_set,
                             const std::optional<std::string> &silence = std::nullopt);

struct WordTiming {
  std::string word;
  int start_frame = 0;
  int end_frame = 0;  // inclusive
  double start_sec = 0.0;
  double end_sec = 0.0;  // end of the last frame: (end_frame + 1) * shift
};

struct WordTimingResult {
  std::vector<WordTiming> words;
  double frame_shift = 0.03;
  double log_prob = 0.0;
  // Phone i covers frames [boundaries[i], boundaries[i + 1]); size = phones + 1.
  std::vector<int> boundaries;
};

// Frame log score used by both aligners: ln max(p, 1e-7).
double AlignmentFrameScore(double posterior);

// Max-score monotonic segmentation. Each mandatory phone gets at least one
// frame, optional ones may get none. Among equal scores the boundary vector
// that is lexicographically smallest (earliest transitions) wins.
WordTimingResult ViterbiAlign(const Matrix &posteriorgram, const PhoneSequence &seq,
                              double frame_shift = 0.03);

struct BruteForceAlignment {
  double log_prob = 0.0;
  std::vector<int> boundaries;
  std::size_t segmentations = 0;
};

// Exhaustive oracle with the same tie rule. Limited to 1e5 segmentations.
BruteForceAlignment AlignBruteForce(const Matrix &posteriorgram, const PhoneSequence &seq);

// Timed words from a boundary vector.
std::vector<WordTiming> WordsFromBoundaries(const PhoneSequence &seq,
                                            const std::vector<int> &boundaries,
                                            double frame_shift);

struct TimedWord {
  std::string word;
  std::optional<double> start_sec;  // absent for the RNN-T baseline
  double end_sec = 0.0;
};

// End time of each word = emit frame of its last piece * frame shift.
std::vector<TimedWord> RnntBaselineEndTimes(const Hypothesis &hyp, const Vocabulary &vocab,
                                            double frame_shift);

std::vector<TimedWord> ToTimedWords(const std::vector<WordTiming> &words);

struct TimingMetrics {
  std::optional<double> ave_st_ms;
  double ave_et_ms = 0.0;
  std::optional<double> pct_ws_lt_200;
  double pct_we_lt_200 = 0.0;
  std::size_t words = 0;
};

// hyp and ref must carry the same word sequence (kEvaluation otherwise).
// Deltas are taken at nanosecond resolution so hand cases come out exact.
TimingMetrics ComputeTimingMetrics(const std::vector<TimedWord> &hyp,
                                   const std::vector<TimedWord> &ref);

// Correctly recognized words of an utterance, paired hyp/ref through the
// edit-distance alignment. Substituted, inserted and deleted words drop out.
void MatchCorrectWords(const std::vector<TimedWord> &hyp, const std::vector<TimedWord> &ref,
                       std::vector<TimedWord> *hyp_out, std::vector<TimedWord> *ref_out);

std::string TimingMetricsToJson(const TimingMetrics &m);

std::vector<CtmRow> TimingToCtm(const std::string &utt_id, const std::vector<WordTiming> &words);
// Groups CTM rows per utterance, preserving row order.
std::vector<std::pair<std::string, std::vector<TimedWord>>> TimedWordsFromCtm(
    const std::vector<CtmRow> &rows);

}  // namespace rnntk

#endif  // RNNTK_TIMING_WORD_TIMING_H_
