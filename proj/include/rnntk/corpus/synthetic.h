// include/rnntk/corpus/synthetic.h
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

#ifndef RNNTK_CORPUS_SYNTHETIC_H_
#define RNNTK_CORPUS_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rnntk/audio/wav.h"
#include "rnntk/io/ctm.h"
#include "rnntk/io/lexicon.h"
#include "rnntk/io/manifest.h"
#include "rnntk/numcore/layers.h"
#include "rnntk/transducer/vocabulary.h"

namespace rnntk {

// Feature frames travel as 16-bit PCM: each frame is `dim` consecutive
// samples holding value * scale. At 400 Hz and 12 samples a frame lasts 30 ms,
// so CTM times, frame indices and sample offsets all line up exactly.
struct FeatureFormat {
  int sample_rate = 400;
  std::size_t dim = 12;
  double scale = 8192.0;

  double FrameShift() const { return static_cast<double>(dim) / sample_rate; }
};

// kData if a value does not fit in int16 after scaling.
WavAudio FeaturesToWav(const Sequence &frames, const FeatureFormat &format = {});
// kData on a rate mismatch or a sample count that is not a whole number of frames.
Sequence WavToFeatures(const WavAudio &audio, const FeatureFormat &format = {});

struct SyntheticCorpusSpec {
  std::vector<std::string> phones;  // includes `silence`
  std::string silence = "sil";
  Lexicon lexicon;
  std::vector<std::string> word_pieces;  // vocabulary without blank
  std::map<std::string, Vector> prototypes;  // per phone, on the PCM grid
  // Word-bigram grammar: a start word is uniform over `words`; each next word
  // is uniform over successors.
  std::vector<std::string> words;
  std::map<std::string, std::vector<std::string>> successors;
  double noise = 0.3;  // stddev of additive Gaussian frame noise
  std::size_t min_words = 2;
  std::size_t max_words = 4;
  int min_phone_frames = 2;
  int max_phone_frames = 4;
  double pause_prob = 0.3;  // silence between words
  int edge_silence_frames = 1;
  std::size_t utterances = 100;
  std::string utt_prefix = "utt";
  std::uint64_t seed = 1;
  FeatureFormat format;

  // kConfig on anything inconsistent.
  void Validate() const;
  Vocabulary MakeVocabulary() const { return Vocabulary::WithBlank(word_pieces); }
};

// The built-in toy language. "source" and "target" share phones, lexicon,
// prototypes and word pieces but use disjoint word bigrams.
SyntheticCorpusSpec ToySpec(const std::string &domain, std::size_t utterances, double noise,
                            std::uint64_t seed);

struct SyntheticUtterance {
  std::string id;
  std::vector<std::string> words;
  Sequence frames;
  std::vector<int> phone_targets;  // per frame, index into spec.phones
  std::vector<CtmRow> word_ctm;
  std::vector<CtmRow> phone_ctm;   // silence included
};

SyntheticUtterance SynthesizeUtterance(const SyntheticCorpusSpec &spec, std::size_t index);

struct SyntheticCorpus {
  std::vector<SyntheticUtterance> utterances;
};

SyntheticCorpus SynthesizeCorpus(const SyntheticCorpusSpec &spec);

// audio/<id>.wav, manifest.jsonl, words.ctm, phones.ctm, lexicon.txt and
// corpus.json (spec, vocabulary and phone set).
void WriteCorpus(const std::filesystem::path &out_dir, const SyntheticCorpusSpec &spec,
                 const SyntheticCorpus &corpus);

std::string CorpusSpecToJson(const SyntheticCorpusSpec &spec);
SyntheticCorpusSpec CorpusSpecFromJson(const std::string &text);

}  // namespace rnntk

#endif  // RNNTK_CORPUS_SYNTHETIC_H_
