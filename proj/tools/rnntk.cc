// tools/rnntk.cc
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

// rnntk: command-line driver for corpus synthesis, splicing, transducer
// training and decoding, word timing and word confidence.

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rnntk/cli/config.h"
#include "rnntk/confidence/confidence.h"
#include "rnntk/corpus/dataset.h"
#include "rnntk/corpus/synthetic.h"
#include "rnntk/errors.h"
#include "rnntk/eval/edit_distance.h"
#include "rnntk/io/ctm.h"
#include "rnntk/io/file_util.h"
#include "rnntk/io/lexicon.h"
#include "rnntk/io/manifest.h"
#include "rnntk/numcore/rng.h"
#include "rnntk/splicer/splicer.h"
#include "rnntk/timing/word_timing.h"
#include "rnntk/transducer/checkpoint.h"
#include "rnntk/transducer/decoder.h"
#include "rnntk/transducer/trainer.h"

namespace rnntk {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Name of the step in progress, reported when a command fails.
std::string g_stage = "startup";

void Stage(const std::string &name) { g_stage = name; }

void Log(const std::string &command, const std::string &msg) {
  std::cerr << "[rnntk " << command << "] " << msg << "\n";
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results are written by
// index, so output order never depends on scheduling. The failure with the
// lowest index is rethrown.
template <typename Fn>
void ParallelFor(std::size_t n, int jobs, Fn &&fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread &t : pool) t.join();
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void WriteLines(const fs::path &path, const std::vector<std::string> &lines) {
  std::string out;
  for (const std::string &l : lines) out += l + "\n";
  WriteFileAtomic(path, out);
}

std::map<std::string, NBestList> ReadNBest(const fs::path &path) {
  std::map<std::string, NBestList> out;
  std::size_t lineno = 0;
  for (const std::string &line : ReadLines(path)) {
    ++lineno;
    if (line.empty()) continue;
    NBestList nb = NBestFromJsonLine(line);
    Require(out.emplace(nb.utt_id, nb).second, ErrorKind::kData,
            path.string() + " line " + std::to_string(lineno) + ": duplicate utterance " +
                nb.utt_id);
  }
  return out;
}

std::vector<std::string> TopWords(const std::map<std::string, NBestList> &nbest,
                                  const std::string &utt, const Vocabulary &vocab) {
  auto it = nbest.find(utt);
  if (it == nbest.end() || it->second.hyps.empty()) return {};
  return vocab.ToWords(it->second.hyps[0].tokens);
}

struct Units {
  Vocabulary vocab;
  std::vector<std::string> phones;
};

Units ReadUnits(const fs::path &path) {
  try {
    const Json j = Json::parse(ReadFileBytes(path));
    return {Vocabulary(j.at("vocabulary").get<std::vector<std::string>>()),
            j.at("phones").get<std::vector<std::string>>()};
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kData, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

class Command {
 public:
  virtual ~Command() = default;
  virtual std::string Name() const = 0;
  virtual std::string Help() const = 0;
  virtual void AddOptions(CLI::App *app) = 0;
  // Checks option values before any work starts.
  virtual void Validate() const {}
  // Returns the JSON report.
  virtual Json Run() = 0;

  std::string config;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir;
  std::string out;

 protected:
  void RequireOption(bool ok, const std::string &msg) const {
    Require(ok, ErrorKind::kConfig, msg);
  }
  void RequirePath(const std::string &value, const std::string &flag) const {
    RequireOption(!value.empty(), "--" + flag + " is required");
  }
};

class MakeCorpus : public Command {
 public:
  std::string Name() const override { return "make-corpus"; }
  std::string Help() const override { return "Synthesize a toy feature-audio corpus"; }
  void AddOptions(CLI::App *app) override {
    app->add_option("--domain", domain_, "source or target word grammar")->capture_default_str();
    app->add_option("--utterances", utterances_)->capture_default_str();
    app->add_option("--noise", noise_, "frame noise stddev")->capture_default_str();
    app->add_option("--utt-prefix", prefix_, "defaults to the domain");
    app->add_option("--min-words", min_words_)->capture_default_str();
    app->add_option("--max-words", max_words_)->capture_default_str();
    app->add_option("--pause-prob", pause_prob_)->capture_default_str();
  }
  void Validate() const override { RequirePath(out_dir, "out-dir"); }
  Json Run() override {
    Stage("build corpus description");
    SyntheticCorpusSpec spec = ToySpec(domain_, utterances_, noise_, seed);
    if (!prefix_.empty()) spec.utt_prefix = prefix_;
    spec.min_words = min_words_;
    spec.max_words = max_words_;
    spec.pause_prob = pause_prob_;
    Stage("synthesize");
    const SyntheticCorpus corpus = SynthesizeCorpus(spec);
    Stage("write corpus");
    WriteCorpus(out_dir, spec, corpus);
    std::size_t frames = 0;
    for (const auto &u : corpus.utterances) frames += u.frames.size();
    return {{"out_dir", out_dir}, {"utterances", corpus.utterances.size()}, {"frames", frames}};
  }

 private:
  std::string domain_ = "source";
  std::size_t utterances_ = 100;
  double noise_ = 0.3;
  std::string prefix_;
  std::size_t min_words_ = 2;
  std::size_t max_words_ = 4;
  double pause_prob_ = 0.3;
};

class BuildInventoryCmd : public Command {
 public:
  std::string Name() const override { return "build-inventory"; }
  std::string Help() const override { return "Index word/phone segments from CTM alignments"; }
  void AddOptions(CLI::App *app) override {
    app->add_option("--words-ctm", words_ctm_);
    app->add_option("--phones-ctm", phones_ctm_);
    app->add_option("--audio-dir", audio_dir_, "holds <utt_id>.wav");
  }
  void Validate() const override {
    RequireOption(!words_ctm_.empty() || !phones_ctm_.empty(),
                  "give --words-ctm, --phones-ctm or both");
    RequirePath(audio_dir_, "audio-dir");
    RequirePath(out, "out");
  }
  Json Run() override {
    AudioStore store;
    SegmentInventory inv;
    if (!words_ctm_.empty()) {
      Stage("word inventory");
      inv = BuildInventory(ReadCtm(words_ctm_), audio_dir_, UnitLevel::kWord, &store);
    }
    if (!phones_ctm_.empty()) {
      Stage("phone inventory");
      inv = MergeInventories(
          inv, BuildInventory(ReadCtm(phones_ctm_), audio_dir_, UnitLevel::kPhone, &store));
    }
    Stage("write inventory");
    WriteFileAtomic(out, InventoryToJson(inv));
    auto count = [](const SegmentMap &m) {
      std::size_t n = 0;
      for (const auto &[unit, segs] : m) n += segs.size();
      return n;
    };
    return {{"inventory", out},
            {"word_types", inv.words.size()},
            {"word_segments", count(inv.words)},
            {"phone_types", inv.phones.size()},
            {"phone_segments", count(inv.phones)}};
  }

 private:
  std::string words_ctm_, phones_ctm_, audio_dir_;
};

class Splice : public Command {
 public:
  std::string Name() const override { return "splice"; }
  std::string Help() const override {
    return "Splice utterances for target texts and mix in real data";
  }
  void AddOptions(CLI::App *app) override {
    app->add_option("--inventory", inventory_);
    app->add_option("--lexicon", lexicon_);
    app->add_option("--texts", texts_, "one utterance per line");
    app->add_option("--real-manifest", real_manifest_);
    app->add_option("--mix-ratio", mix_ratio_, "real utterances per spliced one")
        ->capture_default_str();
    app->add_flag("--skip-unresolvable", skip_, "drop texts with unbuildable words");
  }
  void Validate() const override {
    RequirePath(inventory_, "inventory");
    RequirePath(lexicon_, "lexicon");
    RequirePath(texts_, "texts");
    RequirePath(out_dir, "out-dir");
    RequireOption(mix_ratio_ >= 0.0, "--mix-ratio must be >= 0");
  }
  Json Run() override {
    Stage("read inputs");
    const SegmentInventory inv = InventoryFromJson(ReadFileBytes(inventory_));
    const Lexicon lex = Lexicon::Read(lexicon_);
    std::vector<std::vector<std::string>> texts;
    for (const std::string &line : ReadLines(texts_)) {
      std::vector<std::string> words = SplitWords(line);
      if (!words.empty()) texts.push_back(std::move(words));
    }
    std::vector<ManifestRow> real;
    if (!real_manifest_.empty()) real = ReadResolvedManifest(real_manifest_);
    // Keep the new manifest relocatable: real audio relative to its directory.
    const fs::path base = fs::absolute(out_dir).lexically_normal();
    for (ManifestRow &r : real) {
      r.audio_path = fs::absolute(r.audio_path).lexically_normal().lexically_relative(base).string();
    }
    Stage("splice");
    AudioStore store;
    AdaptationSetOptions opts;
    opts.mix_ratio = mix_ratio_;
    opts.seed = seed;
    opts.skip_unresolvable = skip_;
    const AdaptationSet set = BuildAdaptationSet(texts, inv, lex, real, opts, out_dir, &store);
    std::size_t spliced = 0;
    for (const ManifestRow &r : set.rows) spliced += r.origin == "spliced" ? 1 : 0;
    return {{"manifest", (fs::path(out_dir) / "manifest.jsonl").string()},
            {"spliced", spliced},
            {"real", set.rows.size() - spliced},
            {"skipped", set.skipped}};
  }

 private:
  std::string inventory_, lexicon_, texts_, real_manifest_;
  double mix_ratio_ = 1.0;
  bool skip_ = false;
};

Json LossJson(const BatchLoss &l) {
  return {{"rnnt", l.rnnt}, {"ce", l.ce}, {"objective", l.objective}};
}

class Train : public Command {
 public:
  std::string Name() const override { return "train"; }
  std::string Help() const override { return "Train a transducer (rnnt-only, mtl, ce-branch-only)"; }
  void AddOptions(CLI::App *app) override {
    app->add_option("--manifest", manifest_);
    app->add_option("--units", units_, "corpus.json with vocabulary and phones");
    app->add_option("--phones-ctm", phones_ctm_, "frame targets for the phone branch");
    app->add_option("--init-model", init_model_, "continue from this model directory");
    app->add_option("--mode", mode_)
        ->check(CLI::IsMember({"rnnt-only", "mtl", "ce-branch-only"}))
        ->capture_default_str();
    app->add_option("--alpha", alpha_, "CE weight in mtl mode")->capture_default_str();
    app->add_option("--epochs", fit_.epochs)->capture_default_str();
    app->add_option("--lr", fit_.step.lr)->capture_default_str();
    app->add_option("--batch-size", fit_.batch_size)->capture_default_str();
    app->add_option("--clip-norm", fit_.step.clip_norm)->capture_default_str();
    app->add_option("--encoder-layers", mc_.encoder_layers)->capture_default_str();
    app->add_option("--shared-layers", mc_.shared_layers, "encoder layers below the phone branch")
        ->capture_default_str();
    app->add_option("--encoder-hidden", mc_.encoder_hidden)->capture_default_str();
    app->add_option("--prediction-layers", mc_.prediction_layers)->capture_default_str();
    app->add_option("--prediction-hidden", mc_.prediction_hidden)->capture_default_str();
    app->add_option("--embedding-dim", mc_.embedding_dim)->capture_default_str();
    app->add_option("--joint-dim", mc_.joint_dim)->capture_default_str();
    app->add_option("--branch-layers", mc_.branch_layers)->capture_default_str();
    app->add_option("--branch-hidden", mc_.branch_hidden)->capture_default_str();
    app->add_option("--phone-branch", mc_.phone_branch)->capture_default_str();
  }
  void Validate() const override {
    RequirePath(manifest_, "manifest");
    RequirePath(out_dir, "out-dir");
    RequireOption(!units_.empty() || !init_model_.empty(), "--units or --init-model is required");
    RequireOption(fit_.batch_size > 0, "--batch-size must be positive");
    RequireOption(fit_.step.lr > 0.0, "--lr must be positive");
    RequireOption(alpha_ >= 0.0 && alpha_ <= 1.0, "--alpha must be in [0, 1]");
    RequireOption(mode_ == "rnnt-only" || !phones_ctm_.empty(),
                  "--phones-ctm is required in " + mode_ + " mode");
  }
  Json Run() override {
    Stage("build model");
    TransducerModel model;
    if (!init_model_.empty()) {
      model = LoadModel(init_model_);
    } else {
      const Units units = ReadUnits(units_);
      mc_.input_dim = FeatureFormat{}.dim;
      Rng rng(DeriveSeed(seed, "init"));
      model = TransducerModel::Create(mc_, units.vocab, units.phones, &rng);
    }
    Stage("load data");
    std::vector<CtmRow> ctm;
    if (!phones_ctm_.empty()) ctm = ReadCtm(phones_ctm_);
    const std::vector<Utterance> data = LoadUtterances(manifest_, model.vocab, model.phones, ctm);
    Stage("train");
    fit_.step.mode = ParseTrainMode(mode_);
    fit_.step.alpha = alpha_;
    fit_.seed = DeriveSeed(seed, "fit");
    Json epochs = Json::array();
    Fit(&model, data, fit_, [&](std::size_t e, const BatchLoss &l) {
      Log(Name(), "epoch " + std::to_string(e + 1) + " objective " + FormatFixed(l.objective, 6));
      epochs.push_back(LossJson(l));
    });
    Stage("save model");
    SaveModel(out_dir, model);
    return {{"model", out_dir}, {"mode", mode_}, {"utterances", data.size()}, {"epochs", epochs}};
  }

 private:
  std::string manifest_, units_, phones_ctm_, init_model_;
  std::string mode_ = "mtl";
  double alpha_ = 0.1;
  FitOptions fit_;
  ModelConfig mc_;
};

class AdaptCmd : public Command {
 public:
  std::string Name() const override { return "adapt"; }
  std::string Help() const override {
    return "Adapt a model on spliced + real data with lower encoder layers frozen";
  }
  void AddOptions(CLI::App *app) override {
    app->add_option("--model", model_);
    app->add_option("--manifest", manifest_, "mixed spliced/real manifest");
    app->add_option("--freeze-lower", opts_.freeze_lower)->capture_default_str();
    app->add_option("--steps", opts_.steps)->capture_default_str();
    app->add_option("--lr", opts_.lr)->capture_default_str();
    app->add_option("--batch-size", opts_.batch_size)->capture_default_str();
    app->add_option("--clip-norm", opts_.clip_norm)->capture_default_str();
  }
  void Validate() const override {
    RequirePath(model_, "model");
    RequirePath(manifest_, "manifest");
    RequirePath(out_dir, "out-dir");
    RequireOption(opts_.batch_size > 0, "--batch-size must be positive");
    RequireOption(opts_.lr > 0.0, "--lr must be positive");
  }
  Json Run() override {
    Stage("load model");
    const TransducerModel model = LoadModel(model_);
    Stage("load data");
    const std::vector<Utterance> data = LoadUtterances(manifest_, model.vocab);
    Stage("adapt");
    opts_.seed = DeriveSeed(seed, "adapt");
    const TransducerModel adapted = Adapt(model, data, opts_);
    Stage("save model");
    SaveModel(out_dir, adapted);
    Json loss = LossJson(EvaluateBatch(adapted, data, TrainMode::kRnntOnly, 0.0));
    return {{"model", out_dir}, {"utterances", data.size()}, {"final_loss", loss}};
  }

 private:
  std::string model_, manifest_;
  AdaptOptions opts_;
};

class Decode : public Command {
 public:
  std::string Name() const override { return "decode"; }
  std::string Help() const override { return "Beam-search N-best decoding to JSONL"; }
  void AddOptions(CLI::App *app) override {
    app->add_option("--model", model_);
    app->add_option("--manifest", manifest_);
    app->add_option("--beam", opts_.beam)->capture_default_str();
    app->add_option("--nbest", opts_.nbest)->capture_default_str();
    app->add_option("--symbol-cap", opts_.max_symbols_per_frame, "max labels per frame")
        ->capture_default_str();
    app->add_option("--entropy-includes-blank", opts_.entropy_includes_blank)
        ->capture_default_str();
  }
  void Validate() const override {
    RequirePath(model_, "model");
    RequirePath(manifest_, "manifest");
    RequirePath(out, "out");
    RequireOption(opts_.beam >= 1 && opts_.nbest >= 1 && opts_.nbest <= opts_.beam,
                  "need 1 <= --nbest <= --beam");
    RequireOption(opts_.max_symbols_per_frame >= 1, "--symbol-cap must be >= 1");
  }
  Json Run() override {
    Stage("load model");
    const TransducerModel model = LoadModel(model_);
    const std::vector<ManifestRow> rows = ReadResolvedManifest(manifest_);
    Stage("decode");
    std::vector<std::string> lines(rows.size());
    ParallelFor(rows.size(), jobs, [&](std::size_t i) {
      NBestList nb = BeamSearch(WavToFeatures(ReadWav(rows[i].audio_path)), model, opts_);
      nb.utt_id = rows[i].utt_id;
      lines[i] = NBestToJsonLine(nb, model.vocab);
    });
    Stage("write n-best");
    WriteLines(out, lines);
    return {{"nbest", out}, {"utterances", rows.size()}};
  }

 private:
  std::string model_, manifest_;
  DecodeOptions opts_;
};

class Align : public Command {
 public:
  std::string Name() const override { return "align"; }
  std::string Help() const override {
    return "Word timings by forced alignment on the phone-branch posteriorgram";
  }
  void AddOptions(CLI::App *app) override {
    app->add_option("--model", model_);
    app->add_option("--manifest", manifest_);
    app->add_option("--nbest", nbest_, "decode output; the top hypothesis is aligned");
    app->add_option("--lexicon", lexicon_);
    app->add_option("--silence", silence_, "optional silence phone; empty for none")
        ->capture_default_str();
    app->add_option("--frame-shift", shift_)->capture_default_str();
  }
  void Validate() const override {
    RequirePath(model_, "model");
    RequirePath(manifest_, "manifest");
    RequirePath(nbest_, "nbest");
    RequirePath(lexicon_, "lexicon");
    RequirePath(out, "out");
    RequireOption(shift_ > 0.0, "--frame-shift must be positive");
  }
  Json Run() override {
    Stage("load inputs");
    const TransducerModel model = LoadModel(model_);
    Require(model.phone_branch.has_value(), ErrorKind::kConfig, "model has no phone branch");
    const Lexicon lex = Lexicon::Read(lexicon_);
    const auto nbest = ReadNBest(nbest_);
    const std::vector<ManifestRow> rows = ReadResolvedManifest(manifest_);
    std::optional<std::string> silence;
    if (!silence_.empty()) silence = silence_;
    Stage("align");
    std::vector<std::vector<CtmRow>> ctm(rows.size());
    std::vector<double> log_probs(rows.size(), 0.0);
    std::vector<char> oov(rows.size(), 0);
    ParallelFor(rows.size(), jobs, [&](std::size_t i) {
      Require(nbest.count(rows[i].utt_id) > 0, ErrorKind::kData,
              "no hypothesis for " + rows[i].utt_id);
      const std::vector<std::string> words = TopWords(nbest, rows[i].utt_id, model.vocab);
      if (words.empty()) return;
      // A decoded word without a pronunciation cannot be aligned.
      for (const std::string &w : words) {
        if (!lex.Contains(w)) {
          oov[i] = 1;
          return;
        }
      }
      const Sequence features = WavToFeatures(ReadWav(rows[i].audio_path));
      const PhonePosteriorgram post = CiPhoneForward(Encode(features, model).lower, model);
      const PhoneSequence seq = ExpandToPhones(words, lex, model.phones, silence);
      const WordTimingResult r = ViterbiAlign(post, seq, shift_);
      ctm[i] = TimingToCtm(rows[i].utt_id, r.words);
      log_probs[i] = r.log_prob;
    });
    Stage("write ctm");
    std::vector<CtmRow> all;
    std::size_t aligned = 0, skipped_oov = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      aligned += ctm[i].empty() ? 0 : 1;
      skipped_oov += oov[i];
      if (oov[i]) Log(Name(), rows[i].utt_id + ": hypothesis has a word outside the lexicon");
      all.insert(all.end(), ctm[i].begin(), ctm[i].end());
    }
    WriteCtm(out, all);
    const std::size_t empty = rows.size() - aligned - skipped_oov;
    if (empty > 0) Log(Name(), std::to_string(empty) + " empty hypotheses left unaligned");
    return {{"ctm", out},         {"utterances", rows.size()}, {"aligned", aligned},
            {"skipped_oov", skipped_oov}, {"skipped_empty", empty}, {"words", all.size()}};
  }

 private:
  std::string model_, manifest_, nbest_, lexicon_;
  std::string silence_ = "sil";
  double shift_ = 0.03;
};

class TimingEval : public Command {
 public:
  std::string Name() const override { return "timing-eval"; }
  std::string Help() const override {
    return "Word start/end time deltas against a reference CTM";
  }
  void AddOptions(CLI::App *app) override {
    app->add_option("--ref-ctm", ref_ctm_);
    app->add_option("--hyp-ctm", hyp_ctm_);
    app->add_option("--hyp-nbest", hyp_nbest_, "transducer emission-time baseline");
    app->add_option("--model", model_, "vocabulary for --hyp-nbest");
    app->add_option("--frame-shift", shift_)->capture_default_str();
  }
  void Validate() const override {
    RequirePath(ref_ctm_, "ref-ctm");
    RequireOption(hyp_ctm_.empty() != hyp_nbest_.empty(), "give exactly one of --hyp-ctm, --hyp-nbest");
    RequireOption(hyp_nbest_.empty() || !model_.empty(), "--hyp-nbest needs --model");
    RequireOption(shift_ > 0.0, "--frame-shift must be positive");
  }
  Json Run() override {
    Stage("read reference");
    const auto ref = TimedWordsFromCtm(ReadCtm(ref_ctm_));
    Stage("read hypothesis");
    std::map<std::string, std::vector<TimedWord>> hyp;
    if (!hyp_ctm_.empty()) {
      for (auto &[utt, words] : TimedWordsFromCtm(ReadCtm(hyp_ctm_))) hyp[utt] = words;
    } else {
      const Vocabulary vocab = LoadModel(model_).vocab;
      for (const auto &[utt, nb] : ReadNBest(hyp_nbest_)) {
        if (!nb.hyps.empty()) hyp[utt] = RnntBaselineEndTimes(nb.hyps[0], vocab, shift_);
      }
    }
    Stage("score");
    std::vector<TimedWord> all_hyp, all_ref;
    std::size_t ref_words = 0;
    for (const auto &[utt, words] : ref) {
      ref_words += words.size();
      std::vector<TimedWord> h, r;
      MatchCorrectWords(hyp.count(utt) ? hyp.at(utt) : std::vector<TimedWord>{}, words, &h, &r);
      all_hyp.insert(all_hyp.end(), h.begin(), h.end());
      all_ref.insert(all_ref.end(), r.begin(), r.end());
    }
    Json report = Json::parse(TimingMetricsToJson(ComputeTimingMetrics(all_hyp, all_ref)));
    report["ref_words"] = ref_words;
    return report;
  }

 private:
  std::string ref_ctm_, hyp_ctm_, hyp_nbest_, model_;
  double shift_ = 0.03;
};

// Shared input handling of conf-train and conf-eval.
class ConfidenceInputs {
 public:
  void AddOptions(CLI::App *app) {
    app->add_option("--features", features_, "feature CSV instead of decoding output");
    app->add_option("--model", model_, "transducer model (vocabulary)");
    app->add_option("--nbest", nbest_);
    app->add_option("--manifest", manifest_, "reference transcripts");
    app->add_option("--avg-hyp-reading", reading_, "hypothesis or last-piece")
        ->check(CLI::IsMember({"hypothesis", "last-piece"}))
        ->capture_default_str();
    app->add_option("--features-out", features_out_, "also write the feature CSV here");
  }
  void Validate() const {
    Require(!features_.empty() || (!model_.empty() && !nbest_.empty() && !manifest_.empty()),
            ErrorKind::kConfig, "give --features or all of --model, --nbest, --manifest");
  }
  std::vector<LabeledWord> Load(int jobs) const {
    std::vector<LabeledWord> data;
    if (!features_.empty()) {
      Stage("read features");
      data = ParseFeatureCsv(ReadFileBytes(features_));
    } else {
      Stage("extract features");
      const Vocabulary vocab = LoadModel(model_).vocab;
      const auto nbest = ReadNBest(nbest_);
      const std::vector<ManifestRow> rows = ReadManifest(manifest_);
      const AvgHypReading reading = reading_ == "hypothesis" ? AvgHypReading::kHypothesisPerToken
                                                             : AvgHypReading::kLastPiecePerToken;
      std::vector<std::vector<LabeledWord>> per_utt(rows.size());
      ParallelFor(rows.size(), jobs, [&](std::size_t i) {
        auto it = nbest.find(rows[i].utt_id);
        if (it == nbest.end() || it->second.hyps.empty()) return;
        const auto feats = ExtractWordFeatures(it->second, vocab, reading);
        std::vector<std::string> words;
        for (const auto &f : feats) words.push_back(f.first);
        const std::vector<int> labels = LabelWords(words, SplitWords(rows[i].text));
        for (std::size_t w = 0; w < feats.size(); ++w) {
          per_utt[i].push_back({rows[i].utt_id, w, feats[w].first, feats[w].second, labels[w]});
        }
      });
      for (auto &v : per_utt) data.insert(data.end(), v.begin(), v.end());
    }
    if (!features_out_.empty()) WriteFileAtomic(features_out_, FormatFeatureCsv(data));
    return data;
  }

 private:
  std::string features_, model_, nbest_, manifest_, features_out_;
  std::string reading_ = "hypothesis";
};

class ConfTrain : public Command {
 public:
  std::string Name() const override { return "conf-train"; }
  std::string Help() const override { return "Train the word confidence classifier"; }
  void AddOptions(CLI::App *app) override {
    inputs_.AddOptions(app);
    app->add_option("--hidden-dim", opts_.hidden_dim)->capture_default_str();
    app->add_option("--lr", opts_.lr)->capture_default_str();
    app->add_option("--epochs", opts_.epochs)->capture_default_str();
    app->add_option("--batch-size", opts_.batch_size)->capture_default_str();
  }
  void Validate() const override {
    inputs_.Validate();
    RequirePath(out_dir, "out-dir");
  }
  Json Run() override {
    const std::vector<LabeledWord> data = inputs_.Load(jobs);
    Stage("train classifier");
    opts_.seed = DeriveSeed(seed, "confidence");
    const ConfidenceModel model = TrainClassifier(data, opts_);
    Stage("save classifier");
    SaveConfidenceModel(out_dir, model);
    std::size_t correct = 0;
    for (const LabeledWord &w : data) correct += static_cast<std::size_t>(w.label);
    return {{"model", out_dir},
            {"words", data.size()},
            {"correct", correct},
            {"train_bce", ClassifierLoss(model, data)}};
  }

 private:
  ConfidenceInputs inputs_;
  ClassifierOptions opts_;
};

class ConfEval : public Command {
 public:
  std::string Name() const override { return "conf-eval"; }
  std::string Help() const override {
    return "AUPR of the classifier and of each single feature";
  }
  void AddOptions(CLI::App *app) override {
    inputs_.AddOptions(app);
    app->add_option("--conf-model", conf_model_);
  }
  void Validate() const override {
    inputs_.Validate();
    RequirePath(conf_model_, "conf-model");
  }
  Json Run() override {
    const std::vector<LabeledWord> data = inputs_.Load(jobs);
    Stage("load classifier");
    const ConfidenceModel model = LoadConfidenceModel(conf_model_);
    Stage("evaluate");
    return Json::parse(ConfidenceReportToJson(EvaluateConfidence(model, data)));
  }

 private:
  ConfidenceInputs inputs_;
  std::string conf_model_;
};

class WerCmd : public Command {
 public:
  std::string Name() const override { return "wer"; }
  std::string Help() const override { return "Word error rate of top hypotheses"; }
  void AddOptions(CLI::App *app) override {
    app->add_option("--manifest", manifest_, "reference transcripts");
    app->add_option("--nbest", nbest_);
    app->add_option("--model", model_, "vocabulary");
  }
  void Validate() const override {
    RequirePath(manifest_, "manifest");
    RequirePath(nbest_, "nbest");
    RequirePath(model_, "model");
  }
  Json Run() override {
    Stage("read inputs");
    const Vocabulary vocab = LoadModel(model_).vocab;
    const auto nbest = ReadNBest(nbest_);
    Stage("score");
    ErrorCounts c;
    std::size_t n = 0;
    for (const ManifestRow &row : ReadManifest(manifest_)) {
      c += CountErrors(TopWords(nbest, row.utt_id, vocab), SplitWords(row.text));
      ++n;
    }
    return {{"wer", c.Wer()},
            {"substitutions", c.substitutions},
            {"insertions", c.insertions},
            {"deletions", c.deletions},
            {"ref_words", c.ref_words},
            {"utterances", n}};
  }

 private:
  std::string manifest_, nbest_, model_;
};

// Fills options not given on the command line from a flat config file.
void ApplyConfig(CLI::App *app, const std::string &path) {
  const auto entries = ParseFlatConfig(ReadFileBytes(path), path);
  for (const ConfigEntry &e : entries) {
    const std::string where = path + " line " + std::to_string(e.line);
    CLI::Option *opt = app->get_option_no_throw("--" + e.key);
    Require(opt != nullptr && e.key != "config" && e.key != "help", ErrorKind::kConfig,
            where + ": unknown key '" + e.key + "' for " + app->get_name());
    if (opt->count() > 0) continue;
    try {
      opt->add_result(e.value);
      opt->run_callback();
    } catch (const CLI::Error &err) {
      Fail(ErrorKind::kConfig, where + ": " + err.what());
    }
  }
}

int Main(int argc, char **argv) {
  CLI::App app("rnntk: toy RNN-T toolkit for spliced adaptation, word timing and confidence");
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;
  commands.push_back(std::make_unique<MakeCorpus>());
  commands.push_back(std::make_unique<BuildInventoryCmd>());
  commands.push_back(std::make_unique<Splice>());
  commands.push_back(std::make_unique<Train>());
  commands.push_back(std::make_unique<AdaptCmd>());
  commands.push_back(std::make_unique<Decode>());
  commands.push_back(std::make_unique<Align>());
  commands.push_back(std::make_unique<TimingEval>());
  commands.push_back(std::make_unique<ConfTrain>());
  commands.push_back(std::make_unique<ConfEval>());
  commands.push_back(std::make_unique<WerCmd>());
  std::vector<std::pair<CLI::App *, Command *>> subs;
  for (auto &cmd : commands) {
    CLI::App *sub = app.add_subcommand(cmd->Name(), cmd->Help());
    sub->add_option("--config", cmd->config, "flat key = value file; flags take precedence");
    sub->add_option("--seed", cmd->seed, "master seed")->capture_default_str();
    sub->add_option("--jobs", cmd->jobs, "utterance-parallel threads")->capture_default_str();
    sub->add_option("--out-dir", cmd->out_dir);
    sub->add_option("--out", cmd->out, "primary output file (reports: stdout when absent)");
    cmd->AddOptions(sub);
    subs.push_back({sub, cmd.get()});
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }
  for (auto [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    const std::string name = cmd->Name();
    try {
      Stage("config");
      if (!cmd->config.empty()) ApplyConfig(sub, cmd->config);
      Require(cmd->jobs >= 1, ErrorKind::kConfig, "--jobs must be >= 1");
      cmd->Validate();
      std::istringstream resolved(sub->config_to_str(true, false));
      for (std::string line; std::getline(resolved, line);) Log(name, "config " + line);
      Log(name, "seed " + std::to_string(cmd->seed));
      Json report = cmd->Run();
      Stage("write report");
      const std::string text = report.dump(2) + "\n";
      const bool report_to_file = !cmd->out.empty() &&
                                  (name == "timing-eval" || name == "conf-eval" || name == "wer");
      if (report_to_file) {
        WriteFileAtomic(cmd->out, text);
      } else {
        std::cout << text;
      }
    } catch (const Error &e) {
      std::cerr << "rnntk " << name << ": " << g_stage << " failed: " << e.what() << "\n";
      return 1;
    } catch (const std::exception &e) {
      std::cerr << "rnntk " << name << ": " << g_stage << " failed: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace
}  // namespace rnntk

int main(int argc, char **argv) { return rnntk::Main(argc, argv); }
