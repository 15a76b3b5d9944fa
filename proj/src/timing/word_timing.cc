// src/timing/word_timing.cc
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

#include "rnntk/timing/word_timing.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "json.hpp"
#include "rnntk/errors.h"
#include "rnntk/eval/edit_distance.h"
#include "rnntk/numcore/ops.h"

namespace rnntk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxSegmentations = 100000;

bool Tied(double value, double best) {
  return value >= best - 1e-10 * (1.0 + std::abs(best));
}

void CheckInputs(const Matrix &post, const PhoneSequence &seq) {
  Require(seq.optional.size() == seq.phones.size(), ErrorKind::kContract,
          "optional flags not parallel to phones");
  for (int p : seq.phones) {
    Require(p >= 0 && static_cast<std::size_t>(p) < post.cols(), ErrorKind::kShape,
            "phone id " + std::to_string(p) + " outside posteriorgram with " +
                std::to_string(post.cols()) + " columns");
  }
  const std::size_t mandatory = seq.MandatoryCount();
  if (mandatory > post.rows()) {
    Fail(ErrorKind::kInfeasible, std::to_string(post.rows()) + " frames cannot hold " +
                                     std::to_string(mandatory) + " phones");
  }
}

// Phones that may follow phone i (i = -1 for the start): the next one and,
// while those are optional, the ones after them.
std::vector<std::size_t> Successors(const PhoneSequence &seq, long i) {
  std::vector<std::size_t> out;
  for (std::size_t j = static_cast<std::size_t>(i + 1); j < seq.size(); ++j) {
    out.push_back(j);
    if (!seq.optional[j]) break;
  }
  return out;
}

bool CanEndAfter(const PhoneSequence &seq, std::size_t i) {
  for (std::size_t j = i + 1; j < seq.size(); ++j) {
    if (!seq.optional[j]) return false;
  }
  return true;
}

}  // namespace

std::size_t PhoneSequence::MandatoryCount() const {
  return static_cast<std::size_t>(std::count(optional.begin(), optional.end(), false));
}

PhoneSequence ExpandToPhones(const std::vector<std::string> &words, const Lexicon &lexicon,
                             const std::vector<std::string> &phone_set,
                             const std::optional<std::string> &silence) {
  auto phone_id = [&](const std::string &p, const std::string &word) {
    auto it = std::find(phone_set.begin(), phone_set.end(), p);
    if (it == phone_set.end()) {
      Fail(ErrorKind::kLexicon, "phone '" + p + "' of '" + word + "' is not in the phone set");
    }
    return static_cast<int>(it - phone_set.begin());
  };
  PhoneSequence seq;
  if (words.empty()) return seq;
  int sil = -1;
  if (silence) sil = phone_id(*silence, "<silence>");
  auto add_silence = [&] {
    if (sil < 0) return;
    seq.phones.push_back(sil);
    seq.optional.push_back(true);
  };
  add_silence();
  for (const std::string &word : words) {
    const std::vector<std::string> &pron = lexicon.Pronunciation(word);
    WordSpan span{word, seq.phones.size(), 0};
    for (const std::string &p : pron) {
      seq.phones.push_back(phone_id(p, word));
      seq.optional.push_back(false);
    }
    span.last_phone = seq.phones.size() - 1;
    seq.words.push_back(span);
    add_silence();
  }
  return seq;
}

double AlignmentFrameScore(double posterior) {
  return std::log(std::max(posterior, kProbFloor));
}

std::vector<WordTiming> WordsFromBoundaries(const PhoneSequence &seq,
                                            const std::vector<int> &boundaries,
                                            double frame_shift) {
  Require(boundaries.size() == seq.size() + 1, ErrorKind::kContract,
          "boundary vector must have phones + 1 entries");
  std::vector<WordTiming> out;
  for (const WordSpan &span : seq.words) {
    WordTiming w;
    w.word = span.word;
    w.start_frame = boundaries[span.first_phone];
    w.end_frame = boundaries[span.last_phone + 1] - 1;
    w.start_sec = w.start_frame * frame_shift;
    w.end_sec = (w.end_frame + 1) * frame_shift;
    out.push_back(std::move(w));
  }
  return out;
}

WordTimingResult ViterbiAlign(const Matrix &post, const PhoneSequence &seq, double frame_shift) {
  CheckInputs(post, seq);
  WordTimingResult result;
  result.frame_shift = frame_shift;
  const std::size_t n = seq.size(), T = post.rows();
  if (n == 0) return result;
  if (T == 0) {
    // Only reachable when every phone is optional.
    result.boundaries.assign(n + 1, 0);
    return result;
  }

  // q[i][t]: best score of frames t..T-1 given frame t sits in phone i.
  std::vector<std::vector<double>> q(n, std::vector<double>(T, kNegInf));
  std::vector<std::vector<std::size_t>> next(n);
  for (std::size_t i = 0; i < n; ++i) next[i] = Successors(seq, static_cast<long>(i));
  for (std::size_t i = 0; i < n; ++i) {
    if (CanEndAfter(seq, i)) q[i][T - 1] = AlignmentFrameScore(post(T - 1, seq.phones[i]));
  }
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = q[i][t + 1];
      for (std::size_t j : next[i]) best = std::max(best, q[j][t + 1]);
      if (best == kNegInf) continue;
      q[i][t] = AlignmentFrameScore(post(t, seq.phones[i])) + best;
    }
  }

  // Earliest transitions first: among tied options take the farthest skip,
  // and moving on beats staying.
  auto pick = [&](const std::vector<std::size_t> &advance, long stay, std::size_t t) {
    double best = stay >= 0 ? q[static_cast<std::size_t>(stay)][t] : kNegInf;
    for (std::size_t j : advance) best = std::max(best, q[j][t]);
    Require(best != kNegInf, ErrorKind::kInfeasible, "no alignment path");
    for (auto it = advance.rbegin(); it != advance.rend(); ++it) {
      if (Tied(q[*it][t], best)) return std::make_pair(static_cast<long>(*it), best);
    }
    return std::make_pair(stay, best);
  };

  std::vector<int> b(n + 1, static_cast<int>(T));
  auto [cur, total] = pick(Successors(seq, -1), -1, 0);
  for (long k = 0; k <= cur; ++k) b[static_cast<std::size_t>(k)] = 0;
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const long nxt = pick(next[static_cast<std::size_t>(cur)], cur, t + 1).first;
    for (long k = cur + 1; k <= nxt; ++k) b[static_cast<std::size_t>(k)] = static_cast<int>(t + 1);
    cur = nxt;
  }
  result.log_prob = total;
  result.boundaries = b;
  result.words = WordsFromBoundaries(seq, b, frame_shift);
  return result;
}

BruteForceAlignment AlignBruteForce(const Matrix &post, const PhoneSequence &seq) {
  CheckInputs(post, seq);
  const std::size_t n = seq.size(), T = post.rows();
  BruteForceAlignment out;
  if (n == 0) return out;

  // count[i][s]: segmentations of phones i.. over frames s..T-1.
  std::vector<std::vector<double>> count(n + 1, std::vector<double>(T + 1, 0.0));
  count[n][T] = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t min_len = seq.optional[i] ? 0 : 1;
    for (std::size_t s = 0; s <= T; ++s) {
      for (std::size_t e = s + min_len; e <= T; ++e) count[i][s] += count[i + 1][e];
    }
  }
  Require(count[0][0] <= static_cast<double>(kMaxSegmentations), ErrorKind::kContract,
          "too many segmentations for exhaustive alignment");

  std::vector<int> b(n + 1, 0);
  std::vector<double> scores;
  std::vector<std::vector<int>> all;
  auto walk = [&](auto &&self, std::size_t i, double score) -> void {
    const int start = b[i];
    const int min_end = start + (seq.optional[i] ? 0 : 1);
    double acc = score;
    for (int e = start; e <= static_cast<int>(T); ++e) {
      if (e >= min_end && (i + 1 < n || e == static_cast<int>(T))) {
        b[i + 1] = e;
        if (i + 1 == n) {
          scores.push_back(acc);
          all.push_back(b);
        } else {
          self(self, i + 1, acc);
        }
      }
      if (e < static_cast<int>(T)) acc += AlignmentFrameScore(post(e, seq.phones[i]));
    }
  };
  walk(walk, 0, 0.0);
  out.segmentations = scores.size();
  Require(!scores.empty(), ErrorKind::kInfeasible, "no alignment path");
  const double best = *std::max_element(scores.begin(), scores.end());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (Tied(scores[k], best)) {
      out.log_prob = scores[k];
      out.boundaries = all[k];
      break;
    }
  }
  return out;
}

std::vector<TimedWord> RnntBaselineEndTimes(const Hypothesis &hyp, const Vocabulary &vocab,
                                            double frame_shift) {
  Require(hyp.emit_frames.size() == hyp.tokens.size(), ErrorKind::kContract,
          "emit frames not parallel to tokens");
  std::vector<TimedWord> out;
  for (const WordGroup &g : vocab.GroupWords(hyp.tokens)) {
    out.push_back({g.word, std::nullopt, hyp.emit_frames[g.last_token] * frame_shift});
  }
  return out;
}

std::vector<TimedWord> ToTimedWords(const std::vector<WordTiming> &words) {
  std::vector<TimedWord> out;
  for (const WordTiming &w : words) out.push_back({w.word, w.start_sec, w.end_sec});
  return out;
}

TimingMetrics ComputeTimingMetrics(const std::vector<TimedWord> &hyp,
                                   const std::vector<TimedWord> &ref) {
  Require(hyp.size() == ref.size(), ErrorKind::kEvaluation,
          "hyp and ref timings cover different word counts");
  Require(!hyp.empty(), ErrorKind::kEvaluation, "no words to evaluate");
  constexpr long long kLimitNs = 200'000'000;
  auto delta_ns = [](double a, double b) { return std::llround(std::abs(a - b) * 1e9); };
  bool have_start = true;
  for (const TimedWord &w : hyp) have_start = have_start && w.start_sec.has_value();
  long long st_sum = 0, et_sum = 0;
  std::size_t st_ok = 0, et_ok = 0;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    Require(hyp[i].word == ref[i].word, ErrorKind::kEvaluation,
            "word mismatch at position " + std::to_string(i) + ": '" + hyp[i].word + "' vs '" +
                ref[i].word + "'");
    const long long de = delta_ns(hyp[i].end_sec, ref[i].end_sec);
    et_sum += de;
    et_ok += de < kLimitNs ? 1 : 0;
    if (have_start) {
      Require(ref[i].start_sec.has_value(), ErrorKind::kEvaluation, "reference lacks start times");
      const long long ds = delta_ns(*hyp[i].start_sec, *ref[i].start_sec);
      st_sum += ds;
      st_ok += ds < kLimitNs ? 1 : 0;
    }
  }
  const double n = static_cast<double>(hyp.size());
  TimingMetrics m;
  m.words = hyp.size();
  m.ave_et_ms = static_cast<double>(et_sum) / n / 1e6;
  m.pct_we_lt_200 = 100.0 * static_cast<double>(et_ok) / n;
  if (have_start) {
    m.ave_st_ms = static_cast<double>(st_sum) / n / 1e6;
    m.pct_ws_lt_200 = 100.0 * static_cast<double>(st_ok) / n;
  }
  return m;
}

void MatchCorrectWords(const std::vector<TimedWord> &hyp, const std::vector<TimedWord> &ref,
                       std::vector<TimedWord> *hyp_out, std::vector<TimedWord> *ref_out) {
  std::vector<std::string> hw, rw;
  for (const TimedWord &w : hyp) hw.push_back(w.word);
  for (const TimedWord &w : ref) rw.push_back(w.word);
  for (const AlignedPair &p : AlignWords(hw, rw)) {
    if (p.op != EditOp::kMatch) continue;
    hyp_out->push_back(hyp[static_cast<std::size_t>(p.hyp_index)]);
    ref_out->push_back(ref[static_cast<std::size_t>(p.ref_index)]);
  }
}

std::string TimingMetricsToJson(const TimingMetrics &m) {
  nlohmann::ordered_json j;
  j["ave_st_ms"] = m.ave_st_ms ? nlohmann::ordered_json(*m.ave_st_ms) : nullptr;
  j["ave_et_ms"] = m.ave_et_ms;
  j["pct_ws_lt_200"] = m.pct_ws_lt_200 ? nlohmann::ordered_json(*m.pct_ws_lt_200) : nullptr;
  j["pct_we_lt_200"] = m.pct_we_lt_200;
  j["words"] = m.words;
  return j.dump(2) + "\n";
}

std::vector<CtmRow> TimingToCtm(const std::string &utt_id, const std::vector<WordTiming> &words) {
  std::vector<CtmRow> rows;
  for (const WordTiming &w : words) {
    rows.push_back({utt_id, 1, w.start_sec, w.end_sec - w.start_sec, w.word, 0});
  }
  return rows;
}

std::vector<std::pair<std::string, std::vector<TimedWord>>> TimedWordsFromCtm(
    const std::vector<CtmRow> &rows) {
  std::vector<std::pair<std::string, std::vector<TimedWord>>> out;
  std::map<std::string, std::size_t> index;
  for (const CtmRow &r : rows) {
    auto [it, inserted] = index.emplace(r.utt_id, out.size());
    if (inserted) out.push_back({r.utt_id, {}});
    out[it->second].second.push_back({r.unit, r.start, r.start + r.duration});
  }
  return out;
}

}  // namespace rnntk
