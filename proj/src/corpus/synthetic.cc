// src/corpus/synthetic.cc
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

#include "rnntk/corpus/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rnntk/errors.h"
#include "rnntk/io/file_util.h"
#include "rnntk/numcore/rng.h"

namespace rnntk {

namespace {

using Json = nlohmann::ordered_json;

double Quantize(double v, double scale) {
  const double lo = std::numeric_limits<std::int16_t>::min();
  const double hi = std::numeric_limits<std::int16_t>::max();
  return std::clamp(std::round(v * scale), lo, hi) / scale;
}

}  // namespace

WavAudio FeaturesToWav(const Sequence &frames, const FeatureFormat &format) {
  WavAudio audio;
  audio.sample_rate = format.sample_rate;
  audio.samples.reserve(frames.size() * format.dim);
  for (const Vector &f : frames) {
    Require(f.size() == format.dim, ErrorKind::kShape, "feature frame has wrong dimension");
    for (double v : f) {
      const double s = std::round(v * format.scale);
      Require(s >= std::numeric_limits<std::int16_t>::min() &&
                  s <= std::numeric_limits<std::int16_t>::max(),
              ErrorKind::kData, "feature value out of PCM range");
      audio.samples.push_back(static_cast<std::int16_t>(s));
    }
  }
  return audio;
}

Sequence WavToFeatures(const WavAudio &audio, const FeatureFormat &format) {
  Require(audio.sample_rate == format.sample_rate, ErrorKind::kData,
          "feature audio must be " + std::to_string(format.sample_rate) + " Hz, got " +
              std::to_string(audio.sample_rate));
  Require(audio.samples.size() % format.dim == 0, ErrorKind::kData,
          "sample count is not a whole number of frames");
  Sequence frames(audio.samples.size() / format.dim, Vector(format.dim));
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    frames[i / format.dim][i % format.dim] = audio.samples[i] / format.scale;
  }
  return frames;
}

void SyntheticCorpusSpec::Validate() const {
  auto check = [](bool ok, const std::string &msg) { Require(ok, ErrorKind::kConfig, msg); };
  const std::set<std::string> phone_set(phones.begin(), phones.end());
  check(phone_set.size() == phones.size(), "duplicate phone");
  check(phone_set.count(silence) == 1, "silence phone '" + silence + "' not in phone set");
  check(noise >= 0.0 && std::isfinite(noise), "noise must be >= 0");
  check(min_words >= 1 && min_words <= max_words, "bad word count range");
  check(min_phone_frames >= 1 && min_phone_frames <= max_phone_frames,
        "bad phone duration range");
  check(pause_prob >= 0.0 && pause_prob <= 1.0, "pause probability must be in [0, 1]");
  check(edge_silence_frames >= 0, "edge silence must be >= 0");
  check(format.dim > 0 && format.sample_rate > 0 && format.scale > 0, "bad feature format");
  for (const std::string &p : phones) {
    auto it = prototypes.find(p);
    check(it != prototypes.end(), "no prototype for phone " + p);
    check(it->second.size() == format.dim, "prototype of " + p + " has wrong dimension");
  }
  check(prototypes.size() == phones.size(), "prototype for unknown phone");
  for (auto a = prototypes.begin(); a != prototypes.end(); ++a) {
    for (auto b = std::next(a); b != prototypes.end(); ++b) {
      check(a->second != b->second, "prototypes of " + a->first + " and " + b->first + " coincide");
    }
  }
  check(!words.empty(), "empty word list");
  const Vocabulary vocab = MakeVocabulary();
  for (const std::string &w : words) {
    check(lexicon.Contains(w), "word " + w + " not in lexicon");
    for (const std::string &p : lexicon.Pronunciation(w)) {
      check(phone_set.count(p) == 1, "phone " + p + " of " + w + " not in phone set");
    }
    try {
      const std::string one[] = {w};
      vocab.Tokenize(one);
    } catch (const Error &e) {
      Fail(ErrorKind::kConfig, std::string("word pieces do not cover ") + w + ": " + e.what());
    }
    if (max_words > 1) {
      auto it = successors.find(w);
      check(it != successors.end() && !it->second.empty(), "word " + w + " has no successor");
      for (const std::string &s : it->second) {
        check(std::find(words.begin(), words.end(), s) != words.end(),
              "successor " + s + " is not a word");
      }
    }
  }
}

SyntheticCorpusSpec ToySpec(const std::string &domain, std::size_t utterances, double noise,
                            std::uint64_t seed) {
  Require(domain == "source" || domain == "target", ErrorKind::kConfig,
          "domain must be source or target, got '" + domain + "'");
  SyntheticCorpusSpec spec;
  spec.phones = {"AA", "AE", "B", "D", "EH", "F", "IY", "K", "L", "M", "N", "OW", "S", "sil"};
  const std::vector<std::pair<std::string, std::string>> lex = {
      {"play", "B L EH"},  {"stop", "S D AA"},         {"music", "M IY S"},
      {"call", "K AA L"},  {"mom", "M AA M"},          {"open", "OW B EH N"},
      {"door", "D OW"},    {"light", "L AE D"},        {"on", "AA N"},
      {"off", "AA F"},     {"cortana", "K OW D AE N AA"}, {"news", "N IY S"}};
  for (const auto &[word, pron] : lex) {
    std::vector<std::string> phones;
    std::istringstream in(pron);
    for (std::string p; in >> p;) phones.push_back(p);
    spec.lexicon.Add(word, phones);
    spec.words.push_back(word);
  }
  const std::string ws(kWordStart);
  spec.word_pieces = {ws + "play", ws + "stop", ws + "music", ws + "call", ws + "mom",
                      ws + "o",    "pen",       ws + "door",  ws + "light", ws + "on",
                      ws + "off",  ws + "cor",  "tana",       ws + "news"};
  // Shared by both domains, hence a fixed seed.
  Rng proto_rng(DeriveSeed(7, "prototypes"));
  for (const std::string &p : spec.phones) {
    Vector v(spec.format.dim);
    for (double &x : v) x = Quantize(proto_rng.Uniform(-0.5, 0.5), spec.format.scale);
    spec.prototypes[p] = v;
  }
  const std::vector<std::size_t> offsets =
      domain == "source" ? std::vector<std::size_t>{1, 3} : std::vector<std::size_t>{5, 7};
  const std::size_t n = spec.words.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t off : offsets) spec.successors[spec.words[i]].push_back(spec.words[(i + off) % n]);
  }
  spec.noise = noise;
  spec.utterances = utterances;
  spec.utt_prefix = domain;
  spec.seed = seed;
  return spec;
}

SyntheticUtterance SynthesizeUtterance(const SyntheticCorpusSpec &spec, std::size_t index) {
  Rng rng(DeriveSeed(spec.seed, "utterance", index));
  char id[64];
  std::snprintf(id, sizeof(id), "%s_%05zu", spec.utt_prefix.c_str(), index);
  SyntheticUtterance u;
  u.id = id;
  const std::size_t n_words =
      spec.min_words + rng.UniformIndex(spec.max_words - spec.min_words + 1);
  u.words.push_back(spec.words[rng.UniformIndex(spec.words.size())]);
  while (u.words.size() < n_words) {
    const auto &next = spec.successors.at(u.words.back());
    u.words.push_back(next[rng.UniformIndex(next.size())]);
  }

  std::map<std::string, int> phone_index;
  for (std::size_t i = 0; i < spec.phones.size(); ++i) phone_index[spec.phones[i]] = static_cast<int>(i);
  const double shift = spec.format.FrameShift();
  auto emit_phone = [&](const std::string &phone, int frames) {
    const int start = static_cast<int>(u.frames.size());
    const Vector &proto = spec.prototypes.at(phone);
    for (int f = 0; f < frames; ++f) {
      Vector v(proto.size());
      for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = Quantize(proto[k] + spec.noise * rng.Normal(), spec.format.scale);
      }
      u.frames.push_back(std::move(v));
      u.phone_targets.push_back(phone_index.at(phone));
    }
    u.phone_ctm.push_back({u.id, 1, start * shift, frames * shift, phone, 0});
  };
  auto duration = [&] {
    return spec.min_phone_frames +
           static_cast<int>(rng.UniformIndex(
               static_cast<std::size_t>(spec.max_phone_frames - spec.min_phone_frames + 1)));
  };

  if (spec.edge_silence_frames > 0) emit_phone(spec.silence, spec.edge_silence_frames);
  for (std::size_t w = 0; w < u.words.size(); ++w) {
    if (w > 0 && rng.Uniform() < spec.pause_prob) emit_phone(spec.silence, 1 + static_cast<int>(rng.UniformIndex(2)));
    const int start = static_cast<int>(u.frames.size());
    for (const std::string &p : spec.lexicon.Pronunciation(u.words[w])) emit_phone(p, duration());
    const int frames = static_cast<int>(u.frames.size()) - start;
    u.word_ctm.push_back({u.id, 1, start * shift, frames * shift, u.words[w], 0});
  }
  if (spec.edge_silence_frames > 0) emit_phone(spec.silence, spec.edge_silence_frames);
  return u;
}

SyntheticCorpus SynthesizeCorpus(const SyntheticCorpusSpec &spec) {
  spec.Validate();
  SyntheticCorpus corpus;
  for (std::size_t i = 0; i < spec.utterances; ++i) {
    corpus.utterances.push_back(SynthesizeUtterance(spec, i));
  }
  return corpus;
}

std::string CorpusSpecToJson(const SyntheticCorpusSpec &spec) {
  Json j;
  j["format"] = "rnntk-synthetic-corpus-1";
  j["phones"] = spec.phones;
  j["silence"] = spec.silence;
  Json lex = Json::object();
  for (const auto &[w, p] : spec.lexicon.entries()) lex[w] = p;
  j["lexicon"] = lex;
  j["vocabulary"] = spec.MakeVocabulary().symbols();
  j["word_pieces"] = spec.word_pieces;
  Json protos = Json::object();
  for (const auto &[p, v] : spec.prototypes) protos[p] = v;
  j["prototypes"] = protos;
  j["words"] = spec.words;
  Json succ = Json::object();
  for (const auto &[w, s] : spec.successors) succ[w] = s;
  j["successors"] = succ;
  j["noise"] = spec.noise;
  j["min_words"] = spec.min_words;
  j["max_words"] = spec.max_words;
  j["min_phone_frames"] = spec.min_phone_frames;
  j["max_phone_frames"] = spec.max_phone_frames;
  j["pause_prob"] = spec.pause_prob;
  j["edge_silence_frames"] = spec.edge_silence_frames;
  j["utterances"] = spec.utterances;
  j["utt_prefix"] = spec.utt_prefix;
  j["seed"] = spec.seed;
  j["sample_rate"] = spec.format.sample_rate;
  j["feature_dim"] = spec.format.dim;
  j["feature_scale"] = spec.format.scale;
  j["frame_shift"] = spec.format.FrameShift();
  return j.dump(2) + "\n";
}

SyntheticCorpusSpec CorpusSpecFromJson(const std::string &text) {
  try {
    const Json j = Json::parse(text);
    Require(j.at("format") == "rnntk-synthetic-corpus-1", ErrorKind::kData,
            "unknown corpus format");
    SyntheticCorpusSpec spec;
    spec.phones = j.at("phones").get<std::vector<std::string>>();
    spec.silence = j.at("silence").get<std::string>();
    for (const auto &[w, p] : j.at("lexicon").items()) {
      spec.lexicon.Add(w, p.get<std::vector<std::string>>());
    }
    spec.word_pieces = j.at("word_pieces").get<std::vector<std::string>>();
    for (const auto &[p, v] : j.at("prototypes").items()) spec.prototypes[p] = v.get<Vector>();
    spec.words = j.at("words").get<std::vector<std::string>>();
    for (const auto &[w, s] : j.at("successors").items()) {
      spec.successors[w] = s.get<std::vector<std::string>>();
    }
    spec.noise = j.at("noise").get<double>();
    spec.min_words = j.at("min_words").get<std::size_t>();
    spec.max_words = j.at("max_words").get<std::size_t>();
    spec.min_phone_frames = j.at("min_phone_frames").get<int>();
    spec.max_phone_frames = j.at("max_phone_frames").get<int>();
    spec.pause_prob = j.at("pause_prob").get<double>();
    spec.edge_silence_frames = j.at("edge_silence_frames").get<int>();
    spec.utterances = j.at("utterances").get<std::size_t>();
    spec.utt_prefix = j.at("utt_prefix").get<std::string>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.format.sample_rate = j.at("sample_rate").get<int>();
    spec.format.dim = j.at("feature_dim").get<std::size_t>();
    spec.format.scale = j.at("feature_scale").get<double>();
    return spec;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kData, std::string("bad corpus description: ") + e.what());
  }
}

void WriteCorpus(const std::filesystem::path &out_dir, const SyntheticCorpusSpec &spec,
                 const SyntheticCorpus &corpus) {
  std::filesystem::create_directories(out_dir / "audio");
  std::vector<ManifestRow> rows;
  std::vector<CtmRow> words, phones;
  for (const SyntheticUtterance &u : corpus.utterances) {
    const std::string rel = "audio/" + u.id + ".wav";
    WriteWav(out_dir / rel, FeaturesToWav(u.frames, spec.format));
    std::string text;
    for (const std::string &w : u.words) text += (text.empty() ? "" : " ") + w;
    rows.push_back({u.id, rel, text, "real", ""});
    words.insert(words.end(), u.word_ctm.begin(), u.word_ctm.end());
    phones.insert(phones.end(), u.phone_ctm.begin(), u.phone_ctm.end());
  }
  WriteManifest(out_dir / "manifest.jsonl", rows);
  WriteCtm(out_dir / "words.ctm", words);
  WriteCtm(out_dir / "phones.ctm", phones);
  WriteFileAtomic(out_dir / "lexicon.txt", spec.lexicon.Format());
  WriteFileAtomic(out_dir / "corpus.json", CorpusSpecToJson(spec));
}

}  // namespace rnntk
