// src/confidence/confidence.cc
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

#include "rnntk/confidence/confidence.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "rnntk/errors.h"
#include "rnntk/eval/edit_distance.h"
#include "rnntk/io/file_util.h"
#include "rnntk/numcore/matrix_io.h"
#include "rnntk/numcore/ops.h"
#include "rnntk/numcore/optim.h"
#include "rnntk/numcore/rng.h"

namespace rnntk {

const std::array<const char *, kNumWordFeatures> kWordFeatureNames = {
    "avg_hyp_prob",    "min_wp_prob",     "avg_wp_prob", "min_neg_entropy",
    "avg_neg_entropy", "cn_prob",         "cn_norm_prob"};

std::array<double, kNumWordFeatures> WordFeatures::AsArray() const {
  return {avg_hyp_prob, min_wp_prob, avg_wp_prob, min_neg_entropy,
          avg_neg_entropy, cn_prob, cn_norm_prob};
}

WordFeatures WordFeatures::FromArray(std::span<const double> v) {
  Require(v.size() == kNumWordFeatures, ErrorKind::kShape, "expected 7 word features");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

WordFeatures AggregateWordFeatures(std::span<const WordPieceFeatures> pieces,
                                   AvgHypReading reading) {
  Require(!pieces.empty(), ErrorKind::kContract, "word has no pieces");
  const WordPieceFeatures &last = pieces.back();
  Require(last.emitted_count > 0, ErrorKind::kContract, "emitted token count must be positive");
  WordFeatures f;
  const double numerator =
      reading == AvgHypReading::kHypothesisPerToken ? last.hyp_log_prob : last.wp_log_prob;
  f.avg_hyp_prob = numerator / last.emitted_count;
  f.min_wp_prob = pieces[0].wp_log_prob;
  f.min_neg_entropy = pieces[0].neg_entropy;
  double wp_sum = 0.0, ne_sum = 0.0;
  for (const WordPieceFeatures &p : pieces) {
    f.min_wp_prob = std::min(f.min_wp_prob, p.wp_log_prob);
    f.min_neg_entropy = std::min(f.min_neg_entropy, p.neg_entropy);
    wp_sum += p.wp_log_prob;
    ne_sum += p.neg_entropy;
  }
  const double n = static_cast<double>(pieces.size());
  f.avg_wp_prob = wp_sum / n;
  f.avg_neg_entropy = ne_sum / n;
  return f;
}

std::vector<HypothesisWord> SplitHypothesisWords(const Hypothesis &hyp, const Vocabulary &vocab) {
  const std::size_t n = hyp.tokens.size();
  Require(hyp.wp_log_probs.size() == n && hyp.hyp_log_probs.size() == n &&
              hyp.neg_entropies.size() == n && hyp.emitted_counts.size() == n,
          ErrorKind::kContract, "hypothesis lacks per-piece confidence fields");
  std::vector<HypothesisWord> out;
  for (const WordGroup &g : vocab.GroupWords(hyp.tokens)) {
    HypothesisWord w{g.word, {}};
    for (std::size_t i = g.first_token; i <= g.last_token; ++i) {
      w.pieces.push_back(
          {hyp.wp_log_probs[i], hyp.hyp_log_probs[i], hyp.neg_entropies[i], hyp.emitted_counts[i]});
    }
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

void Vote(std::vector<CnEntry> *slot, const std::string &word, double weight) {
  for (CnEntry &e : *slot) {
    if (e.word == word) {
      e.posterior += weight;
      return;
    }
  }
  slot->push_back({word, weight});
}

}  // namespace

ConfusionNetwork BuildConfusionNetwork(const NBestList &nbest, const Vocabulary &vocab,
                                       CnScoreMode mode) {
  Require(!nbest.hyps.empty(), ErrorKind::kContract, "empty N-best list");
  const std::size_t N = nbest.hyps.size();
  std::vector<std::vector<std::string>> words(N);
  Vector scores(N);
  for (std::size_t i = 0; i < N; ++i) {
    words[i] = vocab.ToWords(nbest.hyps[i].tokens);
    const double s = nbest.hyps[i].log_prob;
    scores[i] = mode == CnScoreMode::kPosterior
                    ? s
                    : s / static_cast<double>(std::max<std::size_t>(1, words[i].size()));
  }
  const Vector w = Softmax(scores);
  const std::vector<std::string> &pivot = words[0];
  const std::size_t P = pivot.size();

  // Pivot slots plus, for each gap g (before pivot word g, g = P at the end),
  // a growing list of insertion slots.
  std::vector<std::vector<CnEntry>> pivot_slots(P);
  std::vector<std::vector<std::vector<CnEntry>>> gaps(P + 1);
  std::vector<std::vector<std::vector<std::pair<std::size_t, std::string>>>> fills(N);
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<std::vector<std::string>> inserted(P + 1);
    std::size_t next_pivot = 0;
    for (const AlignedPair &p : AlignWords(words[i], pivot)) {
      switch (p.op) {
        case EditOp::kMatch:
        case EditOp::kSubstitution:
          Vote(&pivot_slots[static_cast<std::size_t>(p.ref_index)],
               words[i][static_cast<std::size_t>(p.hyp_index)], w[i]);
          next_pivot = static_cast<std::size_t>(p.ref_index) + 1;
          break;
        case EditOp::kDeletion:
          Vote(&pivot_slots[static_cast<std::size_t>(p.ref_index)], kEpsilon, w[i]);
          next_pivot = static_cast<std::size_t>(p.ref_index) + 1;
          break;
        case EditOp::kInsertion:
          inserted[next_pivot].push_back(words[i][static_cast<std::size_t>(p.hyp_index)]);
          break;
      }
    }
    for (std::size_t g = 0; g <= P; ++g) {
      if (gaps[g].size() < inserted[g].size()) gaps[g].resize(inserted[g].size());
    }
    fills[i].resize(P + 1);
    for (std::size_t g = 0; g <= P; ++g) {
      for (std::size_t k = 0; k < inserted[g].size(); ++k) fills[i][g].push_back({k, inserted[g][k]});
    }
  }
  // Every hypothesis votes in every insertion slot: its word or epsilon.
  for (std::size_t g = 0; g <= P; ++g) {
    for (std::size_t k = 0; k < gaps[g].size(); ++k) {
      for (std::size_t i = 0; i < N; ++i) {
        const auto &f = fills[i][g];
        Vote(&gaps[g][k], k < f.size() ? f[k].second : std::string(kEpsilon), w[i]);
      }
    }
  }

  ConfusionNetwork cn;
  for (std::size_t g = 0; g <= P; ++g) {
    for (auto &slot : gaps[g]) cn.slots.push_back(std::move(slot));
    if (g < P) {
      cn.pivot_slot.push_back(cn.slots.size());
      cn.slots.push_back(std::move(pivot_slots[g]));
    }
  }
  for (auto &slot : cn.slots) {
    double total = 0.0;
    for (const CnEntry &e : slot) total += e.posterior;
    for (CnEntry &e : slot) e.posterior /= total;
  }
  return cn;
}

double SlotPosterior(const ConfusionNetwork &cn, std::size_t slot, const std::string &word) {
  Require(slot < cn.slots.size(), ErrorKind::kContract, "slot index out of range");
  for (const CnEntry &e : cn.slots[slot]) {
    if (e.word == word) return e.posterior;
  }
  return 0.0;
}

std::pair<double, double> CnFeatures(std::size_t index, const ConfusionNetwork &posterior_cn,
                                     const ConfusionNetwork &normalized_cn) {
  Require(index < posterior_cn.pivot_slot.size() && index < normalized_cn.pivot_slot.size(),
          ErrorKind::kContract, "word index out of range");
  auto pivot_posterior = [index](const ConfusionNetwork &cn) {
    // The pivot votes first in each of its slots.
    return cn.slots[cn.pivot_slot[index]].front().posterior;
  };
  return {pivot_posterior(posterior_cn), pivot_posterior(normalized_cn)};
}

std::vector<int> LabelWords(const std::vector<std::string> &hyp,
                            const std::vector<std::string> &ref) {
  std::vector<int> labels(hyp.size(), 0);
  for (const AlignedPair &p : AlignWords(hyp, ref)) {
    if (p.op == EditOp::kMatch) labels[static_cast<std::size_t>(p.hyp_index)] = 1;
  }
  return labels;
}

std::vector<std::pair<std::string, WordFeatures>> ExtractWordFeatures(const NBestList &nbest,
                                                                      const Vocabulary &vocab,
                                                                      AvgHypReading reading) {
  Require(!nbest.hyps.empty(), ErrorKind::kContract, "empty N-best list");
  const ConfusionNetwork post_cn = BuildConfusionNetwork(nbest, vocab, CnScoreMode::kPosterior);
  const ConfusionNetwork norm_cn =
      BuildConfusionNetwork(nbest, vocab, CnScoreMode::kLengthNormalized);
  std::vector<std::pair<std::string, WordFeatures>> out;
  std::vector<HypothesisWord> words = SplitHypothesisWords(nbest.hyps[0], vocab);
  for (std::size_t i = 0; i < words.size(); ++i) {
    WordFeatures f = AggregateWordFeatures(words[i].pieces, reading);
    std::tie(f.cn_prob, f.cn_norm_prob) = CnFeatures(i, post_cn, norm_cn);
    out.push_back({words[i].word, f});
  }
  return out;
}

std::string FeatureCsvHeader() {
  std::string h = "utt_id,word_index,word";
  for (const char *name : kWordFeatureNames) h += std::string(",") + name;
  return h + ",label";
}

std::string FeatureCsvRow(const LabeledWord &w) {
  std::string row = w.utt_id + "," + std::to_string(w.word_index) + "," + w.word;
  char buf[40];
  for (double v : w.features.AsArray()) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    row += std::string(",") + buf;
  }
  return row + "," + std::to_string(w.label);
}

std::string FormatFeatureCsv(const std::vector<LabeledWord> &rows) {
  std::string out = FeatureCsvHeader() + "\n";
  for (const LabeledWord &w : rows) out += FeatureCsvRow(w) + "\n";
  return out;
}

std::vector<LabeledWord> ParseFeatureCsv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorKind::kData, "empty feature CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Require(line == FeatureCsvHeader(), ErrorKind::kData, "unexpected feature CSV header");
  std::vector<LabeledWord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    const std::string where = "feature CSV line " + std::to_string(lineno);
    Require(f.size() == 4 + kNumWordFeatures, ErrorKind::kData, where + ": wrong field count");
    LabeledWord w;
    w.utt_id = f[0];
    w.word_index = static_cast<std::size_t>(std::stoul(f[1]));
    w.word = f[2];
    std::array<double, kNumWordFeatures> v{};
    for (std::size_t k = 0; k < kNumWordFeatures; ++k) {
      char *end = nullptr;
      v[k] = std::strtod(f[3 + k].c_str(), &end);
      Require(end != f[3 + k].c_str() && *end == '\0', ErrorKind::kData, where + ": bad number");
    }
    w.features = WordFeatures::FromArray(v);
    w.label = std::stoi(f.back());
    Require(w.label == 0 || w.label == 1, ErrorKind::kData, where + ": label must be 0 or 1");
    rows.push_back(std::move(w));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Classifier

ConfidenceModel InitClassifier(std::size_t hidden_dim, std::uint64_t seed) {
  Require(hidden_dim > 0, ErrorKind::kConfig, "hidden dim must be positive");
  Rng rng(DeriveSeed(seed, "conf-init"));
  ConfidenceModel m;
  m.hidden = DenseLayer::Zeros(kNumWordFeatures, hidden_dim);
  m.output = DenseLayer::Zeros(hidden_dim, 1);
  InitUniform(&m.hidden, &rng);
  InitUniform(&m.output, &rng);
  m.mean.fill(0.0);
  m.stddev.fill(1.0);
  return m;
}

void FitNormalization(std::span<const LabeledWord> data, ConfidenceModel *model) {
  Require(!data.empty(), ErrorKind::kTraining, "empty dataset");
  const double n = static_cast<double>(data.size());
  for (std::size_t k = 0; k < kNumWordFeatures; ++k) {
    double sum = 0.0;
    for (const LabeledWord &w : data) sum += w.features.AsArray()[k];
    const double mean = sum / n;
    double var = 0.0;
    for (const LabeledWord &w : data) {
      const double d = w.features.AsArray()[k] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / n);
    model->mean[k] = mean;
    model->stddev[k] = sd > 1e-12 ? sd : 1.0;
  }
}

namespace {

Vector Normalize(const ConfidenceModel &m, const WordFeatures &f) {
  const auto raw = f.AsArray();
  RequireFinite(raw, "confidence feature");
  Vector x(kNumWordFeatures);
  for (std::size_t k = 0; k < kNumWordFeatures; ++k) x[k] = (raw[k] - m.mean[k]) / m.stddev[k];
  return x;
}

// Binary cross entropy written on the logit for stability.
double BceFromLogit(double o, int label) {
  return std::log1p(std::exp(-std::abs(o))) + std::max(o, 0.0) - label * o;
}

}  // namespace

double ClassifierLoss(const ConfidenceModel &model, std::span<const LabeledWord> batch,
                      ConfidenceModel *grad) {
  Require(!batch.empty(), ErrorKind::kContract, "empty batch");
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  const std::size_t H = model.hidden.OutputDim();
  Vector dh(H), dx(kNumWordFeatures);
  for (const LabeledWord &w : batch) {
    Vector x = Normalize(model, w.features);
    Vector h = DenseForward(x, model.hidden);
    TanhInPlace(h);
    const double o = DenseForward(h, model.output)[0];
    total += BceFromLogit(o, w.label);
    if (grad == nullptr) continue;
    const double d_o = scale * (Sigmoid(o) - w.label);
    std::fill(dh.begin(), dh.end(), 0.0);
    DenseBackward(h, model.output, Vector{d_o}, &grad->output, dh);
    for (std::size_t j = 0; j < H; ++j) dh[j] *= 1.0 - h[j] * h[j];
    std::fill(dx.begin(), dx.end(), 0.0);
    DenseBackward(x, model.hidden, dh, &grad->hidden, dx);
  }
  return total * scale;
}

ConfidenceModel TrainClassifier(std::span<const LabeledWord> data,
                                const ClassifierOptions &options) {
  Require(!data.empty(), ErrorKind::kTraining, "empty training set");
  const auto positives = std::count_if(data.begin(), data.end(),
                                       [](const LabeledWord &w) { return w.label == 1; });
  Require(positives > 0 && positives < static_cast<long>(data.size()), ErrorKind::kTraining,
          "training set needs both correct and incorrect words");
  Require(options.batch_size > 0 && options.lr > 0.0, ErrorKind::kConfig,
          "batch size and learning rate must be positive");
  ConfidenceModel model = InitClassifier(options.hidden_dim, options.seed);
  FitNormalization(data, &model);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LabeledWord> batch;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    Rng rng(DeriveSeed(options.seed, "conf-shuffle", epoch));
    Shuffle(&order, &rng);
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + options.batch_size); ++i) {
        batch.push_back(data[order[i]]);
      }
      ConfidenceModel grad = model;
      grad.hidden = DenseLayer::Zeros(model.hidden.InputDim(), model.hidden.OutputDim());
      grad.output = DenseLayer::Zeros(model.output.InputDim(), 1);
      ClassifierLoss(model, batch, &grad);
      SgdStep(model.hidden.weight.values(), grad.hidden.weight.values(), options.lr);
      SgdStep(model.hidden.bias, grad.hidden.bias, options.lr);
      SgdStep(model.output.weight.values(), grad.output.weight.values(), options.lr);
      SgdStep(model.output.bias, grad.output.bias, options.lr);
    }
  }
  return model;
}

double PredictConfidence(const ConfidenceModel &model, const WordFeatures &features) {
  Vector x;
  try {
    x = Normalize(model, features);
  } catch (const Error &e) {
    Fail(ErrorKind::kData, e.what());
  }
  Vector h = DenseForward(x, model.hidden);
  TanhInPlace(h);
  return Sigmoid(DenseForward(h, model.output)[0]);
}

void SaveConfidenceModel(const std::filesystem::path &dir, const ConfidenceModel &model) {
  std::filesystem::create_directories(dir);
  WriteMatrixFile(dir / "hidden.weight.tdm", model.hidden.weight);
  WriteMatrixFile(dir / "hidden.bias.tdm", Matrix(model.hidden.bias.size(), 1, model.hidden.bias));
  WriteMatrixFile(dir / "output.weight.tdm", model.output.weight);
  WriteMatrixFile(dir / "output.bias.tdm", Matrix(1, 1, model.output.bias));
  nlohmann::ordered_json j;
  j["format"] = "rnntk-confidence-1";
  j["input_dim"] = kNumWordFeatures;
  j["hidden_dim"] = model.hidden.OutputDim();
  j["features"] = kWordFeatureNames;
  j["mean"] = model.mean;
  j["stddev"] = model.stddev;
  WriteFileAtomic(dir / "model.json", j.dump(2) + "\n");
}

ConfidenceModel LoadConfidenceModel(const std::filesystem::path &dir) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(ReadFileBytes(dir / "model.json"));
    Require(j.at("format") == "rnntk-confidence-1", ErrorKind::kData, "unknown model format");
    Require(j.at("input_dim").get<std::size_t>() == kNumWordFeatures, ErrorKind::kData,
            "confidence model must take 7 features");
    ConfidenceModel m;
    const auto H = j.at("hidden_dim").get<std::size_t>();
    m.hidden.weight = ReadMatrixFile(dir / "hidden.weight.tdm");
    Matrix hb = ReadMatrixFile(dir / "hidden.bias.tdm");
    m.hidden.bias.assign(hb.values().begin(), hb.values().end());
    m.output.weight = ReadMatrixFile(dir / "output.weight.tdm");
    Matrix ob = ReadMatrixFile(dir / "output.bias.tdm");
    m.output.bias.assign(ob.values().begin(), ob.values().end());
    m.mean = j.at("mean").get<std::array<double, kNumWordFeatures>>();
    m.stddev = j.at("stddev").get<std::array<double, kNumWordFeatures>>();
    Require(m.hidden.weight.rows() == H && m.hidden.weight.cols() == kNumWordFeatures &&
                m.hidden.bias.size() == H && m.output.weight.rows() == 1 &&
                m.output.weight.cols() == H && m.output.bias.size() == 1,
            ErrorKind::kData, "confidence model shapes disagree with manifest");
    return m;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kData, "bad confidence model manifest: " + std::string(e.what()));
  }
}

// ---------------------------------------------------------------------------
// Evaluation

double Aupr(std::span<const double> scores, std::span<const int> labels, AuprTarget target) {
  Require(scores.size() == labels.size(), ErrorKind::kEvaluation, "scores/labels size mismatch");
  const int positive = target == AuprTarget::kCorrect ? 1 : 0;
  std::vector<std::pair<double, bool>> items;
  std::size_t total_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    Require(labels[i] == 0 || labels[i] == 1, ErrorKind::kEvaluation, "labels must be 0 or 1");
    Require(std::isfinite(scores[i]), ErrorKind::kEvaluation, "non-finite score");
    const double s = target == AuprTarget::kCorrect ? scores[i] : 1.0 - scores[i];
    items.push_back({s, labels[i] == positive});
    total_pos += labels[i] == positive ? 1 : 0;
  }
  Require(total_pos > 0 && total_pos < items.size(), ErrorKind::kEvaluation,
          "AUPR needs both classes present");
  std::sort(items.begin(), items.end(),
            [](const auto &a, const auto &b) { return a.first > b.first; });
  double ap = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i, group_pos = 0;
    while (j < items.size() && items[j].first == items[i].first) {
      group_pos += items[j].second ? 1 : 0;
      ++j;
    }
    tp += group_pos;
    seen += j - i;
    if (group_pos > 0) {
      ap += static_cast<double>(group_pos) * (static_cast<double>(tp) / static_cast<double>(seen));
    }
    i = j;
  }
  return ap / static_cast<double>(total_pos);
}

ConfidenceReport EvaluateConfidence(const ConfidenceModel &model,
                                    std::span<const LabeledWord> data) {
  ConfidenceReport r;
  r.words = data.size();
  std::vector<int> labels;
  Vector conf;
  for (const LabeledWord &w : data) {
    labels.push_back(w.label);
    conf.push_back(PredictConfidence(model, w.features));
  }
  r.aupr_correct = Aupr(conf, labels, AuprTarget::kCorrect);
  r.aupr_incorrect = Aupr(conf, labels, AuprTarget::kIncorrect);
  for (std::size_t k = 0; k < kNumWordFeatures; ++k) {
    Vector s;
    for (const LabeledWord &w : data) s.push_back(w.features.AsArray()[k]);
    r.per_feature.push_back({kWordFeatureNames[k],
                             {Aupr(s, labels, AuprTarget::kIncorrect),
                              Aupr(s, labels, AuprTarget::kCorrect)}});
  }
  return r;
}

std::string ConfidenceReportToJson(const ConfidenceReport &report) {
  nlohmann::ordered_json j;
  j["aupr_correct"] = report.aupr_correct;
  j["aupr_incorrect"] = report.aupr_incorrect;
  nlohmann::ordered_json pf = nlohmann::ordered_json::object();
  for (const auto &[name, v] : report.per_feature) {
    pf[name] = {{"aupr_incorrect", v.first}, {"aupr_correct", v.second}};
  }
  j["per_feature"] = pf;
  j["words"] = report.words;
  return j.dump(2) + "\n";
}

}  // namespace rnntk
