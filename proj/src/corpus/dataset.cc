// src/corpus/dataset.cc
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

#include "rnntk/corpus/dataset.h"

#include <cmath>
#include <sstream>

#include "rnntk/audio/wav.h"
#include "rnntk/errors.h"

namespace rnntk {

std::vector<int> FrameTargetsFromCtm(const std::vector<CtmRow> &rows,
                                     const std::vector<std::string> &phones,
                                     std::size_t num_frames, double frame_shift) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < phones.size(); ++i) index[phones[i]] = static_cast<int>(i);
  std::vector<int> targets(num_frames, -1);
  for (const CtmRow &r : rows) {
    auto it = index.find(r.unit);
    Require(it != index.end(), ErrorKind::kData,
            r.utt_id + ": phone '" + r.unit + "' not in phone set");
    const auto first = static_cast<long>(std::llround(r.start / frame_shift));
    const auto count = static_cast<long>(std::llround(r.duration / frame_shift));
    Require(first >= 0 && count > 0 && static_cast<std::size_t>(first + count) <= num_frames,
            ErrorKind::kData, r.utt_id + ": phone segment outside the utterance");
    for (long f = first; f < first + count; ++f) {
      Require(targets[static_cast<std::size_t>(f)] < 0, ErrorKind::kData,
              r.utt_id + ": overlapping phone segments");
      targets[static_cast<std::size_t>(f)] = it->second;
    }
  }
  for (int t : targets) {
    Require(t >= 0, ErrorKind::kData,
            (rows.empty() ? std::string("?") : rows[0].utt_id) + ": frame without a phone label");
  }
  return targets;
}

std::vector<std::string> SplitWords(const std::string &text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::vector<ManifestRow> ReadResolvedManifest(const std::filesystem::path &manifest) {
  std::vector<ManifestRow> rows = ReadManifest(manifest);
  for (ManifestRow &r : rows) {
    r.audio_path = ResolveAudioPath(manifest, r.audio_path).lexically_normal().string();
  }
  return rows;
}

std::vector<Utterance> LoadUtterances(const std::vector<ManifestRow> &rows,
                                      const Vocabulary &vocab,
                                      const std::vector<std::string> &phones,
                                      const std::vector<CtmRow> &phone_ctm,
                                      const FeatureFormat &format) {
  std::map<std::string, std::vector<CtmRow>> by_utt;
  for (const CtmRow &r : phone_ctm) by_utt[r.utt_id].push_back(r);
  std::vector<Utterance> out;
  for (const ManifestRow &row : rows) {
    Utterance u;
    u.id = row.utt_id;
    u.origin = row.origin;
    u.features = WavToFeatures(ReadWav(row.audio_path), format);
    const std::vector<std::string> words = SplitWords(row.text);
    u.tokens = vocab.Tokenize(words);
    auto it = by_utt.find(row.utt_id);
    if (it != by_utt.end()) {
      u.phone_targets = FrameTargetsFromCtm(it->second, phones, u.features.size(),
                                            format.FrameShift());
    }
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Utterance> LoadUtterances(const std::filesystem::path &manifest,
                                      const Vocabulary &vocab,
                                      const std::vector<std::string> &phones,
                                      const std::vector<CtmRow> &phone_ctm,
                                      const FeatureFormat &format) {
  return LoadUtterances(ReadResolvedManifest(manifest), vocab, phones, phone_ctm, format);
}

}  // namespace rnntk
