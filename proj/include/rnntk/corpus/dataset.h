// include/rnntk/corpus/dataset.h
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

#ifndef RNNTK_CORPUS_DATASET_H_
#define RNNTK_CORPUS_DATASET_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rnntk/corpus/synthetic.h"
#include "rnntk/io/ctm.h"
#include "rnntk/io/manifest.h"
#include "rnntk/transducer/trainer.h"

namespace rnntk {

// Per-frame phone ids from CTM rows of one utterance. Every frame must be
// covered exactly once (kData otherwise).
std::vector<int> FrameTargetsFromCtm(const std::vector<CtmRow> &rows,
                                     const std::vector<std::string> &phones,
                                     std::size_t num_frames, double frame_shift);

std::vector<std::string> SplitWords(const std::string &text);

// Loads audio, tokenizes the text and, when `phone_ctm` has rows for an
// utterance, attaches frame-level phone targets.
std::vector<Utterance> LoadUtterances(const std::filesystem::path &manifest,
                                      const Vocabulary &vocab,
                                      const std::vector<std::string> &phones = {},
                                      const std::vector<CtmRow> &phone_ctm = {},
                                      const FeatureFormat &format = {});

// Same, from in-memory rows whose audio paths are already resolved.
std::vector<Utterance> LoadUtterances(const std::vector<ManifestRow> &rows,
                                      const Vocabulary &vocab,
                                      const std::vector<std::string> &phones,
                                      const std::vector<CtmRow> &phone_ctm,
                                      const FeatureFormat &format = {});

// Manifest rows with audio paths resolved against the manifest directory.
std::vector<ManifestRow> ReadResolvedManifest(const std::filesystem::path &manifest);

}  // namespace rnntk

#endif  // RNNTK_CORPUS_DATASET_H_
