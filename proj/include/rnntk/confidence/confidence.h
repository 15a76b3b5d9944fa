// include/rnntk/confidence/confidence.h
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

#ifndef RNNTK_CONFIDENCE_CONFIDENCE_H_
#define RNNTK_CONFIDENCE_CONFIDENCE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rnntk/numcore/layers.h"
#include "rnntk/transducer/decoder.h"
#include "rnntk/transducer/vocabulary.h"

namespace rnntk {

struct WordPieceFeatures {
  double wp_log_prob = 0.0;
  double hyp_log_prob = 0.0;  // partial hypothesis ending at this piece
  double neg_entropy = 0.0;
  int emitted_count = 0;      // pieces + blanks so far
};

enum class AvgHypReading {
  kHypothesisPerToken,  // partial-hypothesis log prob / emitted tokens
  kLastPiecePerToken,   // last piece's own log prob / emitted tokens
};

inline constexpr std::size_t kNumWordFeatures = 7;
extern const std::array<const char *, kNumWordFeatures> kWordFeatureNames;

struct WordFeatures {
  double avg_hyp_prob = 0.0;
  double min_wp_prob = 0.0;
  double avg_wp_prob = 0.0;
  double min_neg_entropy = 0.0;
  double avg_neg_entropy = 0.0;
  double cn_prob = 0.0;
  double cn_norm_prob = 0.0;

  std::array<double, kNumWordFeatures> AsArray() const;
  static WordFeatures FromArray(std::span<const double> v);
};

// Fills the five decoding features; cn fields stay 0. Pieces in emission
// order; kContract when empty.
WordFeatures AggregateWordFeatures(std::span<const WordPieceFeatures> pieces,
                                   AvgHypReading reading = AvgHypReading::kHypothesisPerToken);

struct HypothesisWord {
  std::string word;
  std::vector<WordPieceFeatures> pieces;
};

// Groups the hypothesis pieces into words via the word-start marker.
std::vector<HypothesisWord> SplitHypothesisWords(const Hypothesis &hyp, const Vocabulary &vocab);

inline constexpr const char *kEpsilon = "<eps>";

struct CnEntry {
  std::string word;  // kEpsilon for "no word"
  double posterior = 0.0;
};

struct ConfusionNetwork {
  std::vector<std::vector<CnEntry>> slots;
  std::vector<std::size_t> pivot_slot;  // slot index of each pivot word
};

enum class CnScoreMode { kPosterior, kLengthNormalized };

// Pivot (top) hypothesis as skeleton; other hypotheses aligned to it by word
// edit distance. Hypothesis weights are a softmax over total log posterior,
// or over log posterior / word count.
ConfusionNetwork BuildConfusionNetwork(const NBestList &nbest, const Vocabulary &vocab,
                                       CnScoreMode mode);

double SlotPosterior(const ConfusionNetwork &cn, std::size_t slot, const std::string &word);

// (cn prob, cn norm prob) of pivot word `index`.
std::pair<double, double> CnFeatures(std::size_t index, const ConfusionNetwork &posterior_cn,
                                     const ConfusionNetwork &normalized_cn);

// 1 for words matching the reference, 0 for substitutions and insertions.
std::vector<int> LabelWords(const std::vector<std::string> &hyp,
                            const std::vector<std::string> &ref);

// Seven features for every word of the top hypothesis.
std::vector<std::pair<std::string, WordFeatures>> ExtractWordFeatures(
    const NBestList &nbest, const Vocabulary &vocab,
    AvgHypReading reading = AvgHypReading::kHypothesisPerToken);

struct LabeledWord {
  std::string utt_id;
  std::size_t word_index = 0;
  std::string word;
  WordFeatures features;
  int label = 0;
};

std::string FeatureCsvHeader();
std::string FeatureCsvRow(const LabeledWord &w);
std::string FormatFeatureCsv(const std::vector<LabeledWord> &rows);
std::vector<LabeledWord> ParseFeatureCsv(const std::string &text);

// tanh hidden layer, one sigmoid output, z-normalized inputs.
struct ConfidenceModel {
  DenseLayer hidden;
  DenseLayer output;
  std::array<double, kNumWordFeatures> mean{};
  std::array<double, kNumWordFeatures> stddev{};

  bool operator==(const ConfidenceModel &) const = default;
};

struct ClassifierOptions {
  std::size_t hidden_dim = 16;
  double lr = 0.1;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
};

ConfidenceModel InitClassifier(std::size_t hidden_dim, std::uint64_t seed);
// Per-feature mean and stddev (population; 1 where a feature is constant).
void FitNormalization(std::span<const LabeledWord> data, ConfidenceModel *model);

// Mean BCE over the batch; accumulates its gradient into *grad when given.
double ClassifierLoss(const ConfidenceModel &model, std::span<const LabeledWord> batch,
                      ConfidenceModel *grad = nullptr);

// kTraining on an empty or single-class dataset.
ConfidenceModel TrainClassifier(std::span<const LabeledWord> data, const ClassifierOptions &options);

double PredictConfidence(const ConfidenceModel &model, const WordFeatures &features);

void SaveConfidenceModel(const std::filesystem::path &dir, const ConfidenceModel &model);
ConfidenceModel LoadConfidenceModel(const std::filesystem::path &dir);

enum class AuprTarget { kCorrect, kIncorrect };

// Average precision. For kIncorrect the positives are label 0 and the
// ranking score is 1 - score. Tied scores form one recall step.
double Aupr(std::span<const double> scores, std::span<const int> labels, AuprTarget target);

struct ConfidenceReport {
  double aupr_correct = 0.0;
  double aupr_incorrect = 0.0;
  std::vector<std::pair<std::string, std::pair<double, double>>> per_feature;  // (incorrect, correct)
  std::size_t words = 0;
};

// Classifier plus each raw feature taken as a score.
ConfidenceReport EvaluateConfidence(const ConfidenceModel &model,
                                    std::span<const LabeledWord> data);
std::string ConfidenceReportToJson(const ConfidenceReport &report);

}  // namespace rnntk

#endif  // RNNTK_CONFIDENCE_CONFIDENCE_H_
