// tests/unit/confidence_test.cc
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

#include <cmath>
#include <functional>

#include "doctest.h"
#include "rnntk/confidence/confidence.h"
#include "rnntk/errors.h"
#include "rnntk/eval/edit_distance.h"
#include "rnntk/numcore/optim.h"
#include "rnntk/numcore/rng.h"

namespace rnntk {
namespace {

ErrorKind KindOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("no rnntk::Error thrown");
  return ErrorKind::kContract;
}

std::string Ws(const std::string &s) { return std::string(kWordStart) + s; }

Vocabulary Vocab() { return Vocabulary::WithBlank({Ws("a"), Ws("b"), Ws("c"), Ws("d"), "x"}); }

Hypothesis Hyp(const Vocabulary &v, const std::vector<std::string> &words, double logp) {
  Hypothesis h;
  h.tokens = v.Tokenize(words);
  h.log_prob = logp;
  for (std::size_t i = 0; i < h.tokens.size(); ++i) {
    h.emit_frames.push_back(static_cast<int>(i));
    h.wp_log_probs.push_back(-0.1 * (i + 1));
    h.hyp_log_probs.push_back(-0.3 * (i + 1));
    h.neg_entropies.push_back(-0.05 * (i + 1));
    h.emitted_counts.push_back(2 * static_cast<int>(i) + 2);
  }
  h.emitted_count = 2 * static_cast<int>(h.tokens.size()) + 1;
  return h;
}

void CheckNormalized(const ConfusionNetwork &cn) {
  for (const auto &slot : cn.slots) {
    double s = 0.0;
    for (const CnEntry &e : slot) s += e.posterior;
    CHECK(std::abs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("aggregation examples") {
  WordPieceFeatures one{-0.1, -0.5, -0.2, 5};
  WordFeatures f = AggregateWordFeatures(std::span(&one, 1));
  CHECK(f.avg_hyp_prob == doctest::Approx(-0.1));
  CHECK(f.min_wp_prob == -0.1);
  CHECK(f.avg_wp_prob == -0.1);
  CHECK(f.min_neg_entropy == -0.2);
  CHECK(f.avg_neg_entropy == -0.2);

  std::vector<WordPieceFeatures> two = {{-0.2, -0.4, -0.1, 2}, {-0.6, -1.0, -0.3, 4}};
  f = AggregateWordFeatures(two);
  CHECK(f.min_wp_prob == doctest::Approx(-0.6));
  CHECK(f.avg_wp_prob == doctest::Approx(-0.4));
  CHECK(f.min_neg_entropy == doctest::Approx(-0.3));
  CHECK(f.avg_neg_entropy == doctest::Approx(-0.2));
  CHECK(f.avg_hyp_prob == doctest::Approx(-0.25));
  CHECK(AggregateWordFeatures(two, AvgHypReading::kLastPiecePerToken).avg_hyp_prob ==
        doctest::Approx(-0.15));

  CHECK(KindOf([] { AggregateWordFeatures({}); }) == ErrorKind::kContract);
}

TEST_CASE("split hypothesis into words") {
  Vocabulary v = Vocabulary::WithBlank({Ws("cor"), "tana", Ws("a")});
  Hypothesis h = Hyp(v, {"cortana", "a"}, -1.0);
  auto words = SplitHypothesisWords(h, v);
  REQUIRE(words.size() == 2);
  CHECK(words[0].word == "cortana");
  CHECK(words[0].pieces.size() == 2);
  CHECK(words[1].pieces.size() == 1);
  CHECK(words[1].pieces[0].emitted_count == 6);
}

TEST_CASE("confusion network examples") {
  Vocabulary v = Vocab();
  SUBCASE("single hypothesis") {
    NBestList nb{"u", {Hyp(v, {"a", "b", "c"}, -2.0)}};
    for (CnScoreMode mode : {CnScoreMode::kPosterior, CnScoreMode::kLengthNormalized}) {
      ConfusionNetwork cn = BuildConfusionNetwork(nb, v, mode);
      REQUIRE(cn.slots.size() == 3);
      for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(cn.slots[i].size() == 1);
        CHECK(cn.slots[i][0].posterior == 1.0);
        CHECK(cn.pivot_slot[i] == i);
      }
      CHECK(cn.slots[2][0].word == "c");
    }
    ConfusionNetwork cn = BuildConfusionNetwork(nb, v, CnScoreMode::kPosterior);
    auto [p, q] = CnFeatures(1, cn, cn);
    CHECK(p == 1.0);
    CHECK(q == 1.0);
  }
  SUBCASE("substitution splits a slot") {
    NBestList nb{"u", {Hyp(v, {"a", "b"}, std::log(0.6)), Hyp(v, {"a", "c"}, std::log(0.4))}};
    ConfusionNetwork cn = BuildConfusionNetwork(nb, v, CnScoreMode::kPosterior);
    REQUIRE(cn.slots.size() == 2);
    CHECK(SlotPosterior(cn, 0, "a") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(SlotPosterior(cn, 1, "b") == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(SlotPosterior(cn, 1, "c") == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(CnFeatures(1, cn, cn).first == doctest::Approx(0.6).epsilon(1e-12));
    CheckNormalized(cn);
  }
  SUBCASE("deletion votes epsilon") {
    NBestList nb{"u", {Hyp(v, {"a", "b"}, std::log(0.7)), Hyp(v, {"a"}, std::log(0.3))}};
    ConfusionNetwork cn = BuildConfusionNetwork(nb, v, CnScoreMode::kPosterior);
    REQUIRE(cn.slots.size() == 2);
    CHECK(SlotPosterior(cn, 1, "b") == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(SlotPosterior(cn, 1, kEpsilon) == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("insertion creates an epsilon-bearing slot") {
    NBestList nb{"u", {Hyp(v, {"a", "b"}, std::log(0.5)), Hyp(v, {"a", "d", "b"}, std::log(0.5))}};
    ConfusionNetwork cn = BuildConfusionNetwork(nb, v, CnScoreMode::kPosterior);
    REQUIRE(cn.slots.size() == 3);
    CHECK(cn.pivot_slot == std::vector<std::size_t>{0, 2});
    CHECK(SlotPosterior(cn, 1, "d") == doctest::Approx(0.5));
    CHECK(SlotPosterior(cn, 1, kEpsilon) == doctest::Approx(0.5));
    CheckNormalized(cn);
  }
  SUBCASE("length normalization changes weights") {
    NBestList nb{"u", {Hyp(v, {"a", "b"}, -1.0), Hyp(v, {"a"}, -1.2)}};
    ConfusionNetwork a = BuildConfusionNetwork(nb, v, CnScoreMode::kPosterior);
    ConfusionNetwork b = BuildConfusionNetwork(nb, v, CnScoreMode::kLengthNormalized);
    const double wa = 1.0 / (1.0 + std::exp(-0.2));
    const double wb = 1.0 / (1.0 + std::exp(-1.2 + 0.5));
    CHECK(SlotPosterior(a, 1, "b") == doctest::Approx(wa));
    CHECK(SlotPosterior(b, 1, "b") == doctest::Approx(wb));
  }
  CHECK(KindOf([&] { BuildConfusionNetwork(NBestList{}, v, CnScoreMode::kPosterior); }) ==
        ErrorKind::kContract);
}

TEST_CASE("random confusion networks stay normalized") {
  Vocabulary v = Vocab();
  const std::vector<std::string> pool = {"a", "b", "c", "d"};
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    NBestList nb{"u", {}};
    const int n = 1 + static_cast<int>(rng.UniformIndex(5));
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> w;
      const int len = static_cast<int>(rng.UniformIndex(5));
      for (int k = 0; k < len; ++k) w.push_back(pool[static_cast<int>(rng.UniformIndex(4))]);
      nb.hyps.push_back(Hyp(v, w, -rng.Uniform() * 5));
    }
    for (CnScoreMode mode : {CnScoreMode::kPosterior, CnScoreMode::kLengthNormalized}) {
      ConfusionNetwork cn = BuildConfusionNetwork(nb, v, mode);
      CheckNormalized(cn);
      const auto pivot = v.ToWords(nb.hyps[0].tokens);
      REQUIRE(cn.pivot_slot.size() == pivot.size());
      for (std::size_t i = 0; i < pivot.size(); ++i) {
        CHECK(SlotPosterior(cn, cn.pivot_slot[i], pivot[i]) > 0.0);
      }
    }
  }
}

TEST_CASE("label words") {
  CHECK(LabelWords({"a", "b"}, {"a", "b"}) == std::vector<int>{1, 1});
  CHECK(LabelWords({"a", "x"}, {"a", "b"}) == std::vector<int>{1, 0});
  CHECK(LabelWords({"a", "b", "c"}, {"a", "c"}) == std::vector<int>{1, 0, 1});
  CHECK(LabelWords({}, {"a"}).empty());

  Rng rng(5);
  const std::vector<std::string> pool = {"a", "b", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> hyp, ref;
    for (int k = static_cast<int>(rng.UniformIndex(6)); k > 0; --k) hyp.push_back(pool[static_cast<int>(rng.UniformIndex(3))]);
    for (int k = static_cast<int>(rng.UniformIndex(6)); k > 0; --k) ref.push_back(pool[static_cast<int>(rng.UniformIndex(3))]);
    auto labels = LabelWords(hyp, ref);
    CHECK(labels.size() == hyp.size());
    ErrorCounts c = CountErrors(hyp, ref);
    int ones = 0;
    for (int l : labels) ones += l;
    CHECK(static_cast<std::size_t>(ones) + c.substitutions + c.insertions == hyp.size());
  }
}

TEST_CASE("extract word features") {
  Vocabulary v = Vocabulary::WithBlank({Ws("cor"), "tana", Ws("a")});
  NBestList nb{"u", {Hyp(v, {"cortana", "a"}, -1.0), Hyp(v, {"a"}, -3.0)}};
  auto feats = ExtractWordFeatures(nb, v);
  REQUIRE(feats.size() == 2);
  CHECK(feats[0].first == "cortana");
  CHECK(feats[0].second.min_wp_prob == doctest::Approx(-0.2));
  CHECK(feats[0].second.avg_hyp_prob == doctest::Approx(-0.6 / 4));
  CHECK(feats[0].second.cn_prob > 0.5);
  CHECK(feats[1].second.cn_prob == doctest::Approx(1.0));
}

TEST_CASE("feature csv round trip") {
  LabeledWord w{"utt1", 3, "go", {-0.1, -0.2, -0.15, -0.3, -0.2, 0.9, 0.8}, 1};
  const std::string csv = FormatFeatureCsv({w, w});
  CHECK(csv.rfind(
            "utt_id,word_index,word,avg_hyp_prob,min_wp_prob,avg_wp_prob,min_neg_entropy,"
            "avg_neg_entropy,cn_prob,cn_norm_prob,label\n",
            0) == 0);
  auto back = ParseFeatureCsv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].features.AsArray() == w.features.AsArray());
  CHECK(back[1].word_index == 3);
  CHECK(KindOf([] { ParseFeatureCsv("bad header\n"); }) == ErrorKind::kData);
}

// Label 1 when feature 3 (min neg entropy) exceeds a threshold, with margin.
std::vector<LabeledWord> Separable(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledWord> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledWord w;
    const int label = static_cast<int>(i % 3 != 0);
    std::array<double, kNumWordFeatures> f{};
    for (double &x : f) x = -rng.Uniform();
    f[3] = label ? -0.2 * rng.Uniform() : -0.5 - rng.Uniform();
    w.features = WordFeatures::FromArray(f);
    w.label = label;
    out.push_back(w);
  }
  return out;
}

Vector Flatten(const ConfidenceModel &m) {
  Vector v;
  for (const DenseLayer *l : {&m.hidden, &m.output}) {
    v.insert(v.end(), l->weight.values().begin(), l->weight.values().end());
    v.insert(v.end(), l->bias.begin(), l->bias.end());
  }
  return v;
}

void Unflatten(std::span<const double> v, ConfidenceModel *m) {
  std::size_t k = 0;
  for (DenseLayer *l : {&m->hidden, &m->output}) {
    for (double &x : l->weight.values()) x = v[k++];
    for (double &x : l->bias) x = v[k++];
  }
}

TEST_CASE("classifier gradient matches finite differences") {
  auto data = Separable(20, 3);
  ConfidenceModel m = InitClassifier(5, 9);
  FitNormalization(data, &m);
  ConfidenceModel grad = m;
  grad.hidden = DenseLayer::Zeros(kNumWordFeatures, 5);
  grad.output = DenseLayer::Zeros(5, 1);
  ClassifierLoss(m, data, &grad);
  auto f = [&](std::span<const double> p) {
    ConfidenceModel probe = m;
    Unflatten(p, &probe);
    return ClassifierLoss(probe, data);
  };
  const Vector params = Flatten(m);
  Vector numeric = FiniteDiffGradient(f, params, 1e-6);
  CHECK(MaxRelativeError(Flatten(grad), numeric) < 1e-4);
}

TEST_CASE("classifier training") {
  auto data = Separable(300, 4);
  ClassifierOptions opt;
  opt.epochs = 200;
  ConfidenceModel a = TrainClassifier(data, opt);
  CHECK(ClassifierLoss(a, data) < 0.05);
  CHECK(TrainClassifier(data, opt) == a);

  opt.epochs = 0;
  ConfidenceModel init = TrainClassifier(data, opt);
  ConfidenceModel expected = InitClassifier(opt.hidden_dim, opt.seed);
  CHECK(init.hidden == expected.hidden);
  CHECK(init.output == expected.output);
  CHECK(init.mean != expected.mean);

  std::vector<LabeledWord> one_class(data.begin(), data.end());
  for (auto &w : one_class) w.label = 1;
  CHECK(KindOf([&] { TrainClassifier(one_class, ClassifierOptions{}); }) == ErrorKind::kTraining);
  CHECK(KindOf([] { TrainClassifier({}, ClassifierOptions{}); }) == ErrorKind::kTraining);

  for (const auto &w : data) {
    const double p = PredictConfidence(a, w.features);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("prediction") {
  ConfidenceModel m = InitClassifier(4, 1);
  for (double &x : m.output.weight.values()) x = 0.0;
  m.output.bias[0] = 0.0;
  CHECK(PredictConfidence(m, {-1, -2, -3, -4, -5, 0.1, 0.9}) == 0.5);
  CHECK(KindOf([&] { PredictConfidence(m, {NAN, 0, 0, 0, 0, 0, 0}); }) == ErrorKind::kData);
}

TEST_CASE("aupr") {
  const Vector s = {0.9, 0.8, 0.7};
  const std::vector<int> l = {1, 0, 1};
  CHECK(Aupr(s, l, AuprTarget::kCorrect) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
  CHECK(Aupr(s, l, AuprTarget::kIncorrect) == doctest::Approx(0.5));
  CHECK(Aupr(Vector{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}, AuprTarget::kCorrect) ==
        1.0);
  CHECK(Aupr(Vector{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}, AuprTarget::kIncorrect) ==
        1.0);
  // All tied: precision is the prevalence.
  CHECK(Aupr(Vector{0.5, 0.5, 0.5, 0.5}, std::vector<int>{1, 0, 0, 0}, AuprTarget::kCorrect) ==
        0.25);
  CHECK(KindOf([] { Aupr(Vector{0.1, 0.2}, std::vector<int>{1, 1}, AuprTarget::kCorrect); }) ==
        ErrorKind::kEvaluation);

  Rng rng(21);
  Vector scores;
  std::vector<int> labels;
  for (int i = 0; i < 10000; ++i) {
    scores.push_back(rng.Uniform());
    labels.push_back(rng.Uniform() < 0.3 ? 1 : 0);
  }
  CHECK(std::abs(Aupr(scores, labels, AuprTarget::kCorrect) - 0.3) < 0.02);
  Vector transformed;
  for (double x : scores) transformed.push_back(std::exp(3 * x) - 7);
  CHECK(Aupr(transformed, labels, AuprTarget::kCorrect) ==
        Aupr(scores, labels, AuprTarget::kCorrect));
}

TEST_CASE("evaluation report and model round trip") {
  auto data = Separable(200, 8);
  ClassifierOptions opt;
  opt.epochs = 100;
  ConfidenceModel m = TrainClassifier(data, opt);
  ConfidenceReport r = EvaluateConfidence(m, data);
  CHECK(r.words == 200);
  REQUIRE(r.per_feature.size() == kNumWordFeatures);
  for (const auto &[name, v] : r.per_feature) CHECK(r.aupr_incorrect >= v.first - 1e-12);
  CHECK(ConfidenceReportToJson(r).find("\"per_feature\"") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "rnntk_conf_model_test";
  std::filesystem::remove_all(dir);
  SaveConfidenceModel(dir, m);
  CHECK(LoadConfidenceModel(dir) == m);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace rnntk
