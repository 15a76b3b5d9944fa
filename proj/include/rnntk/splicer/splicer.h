// include/rnntk/splicer/splicer.h
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

#ifndef RNNTK_SPLICER_SPLICER_H_
#define RNNTK_SPLICER_SPLICER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "rnntk/audio/wav.h"
#include "rnntk/io/ctm.h"
#include "rnntk/io/lexicon.h"
#include "rnntk/io/manifest.h"
#include "rnntk/numcore/rng.h"

namespace rnntk {

// Half-open sample range [start, end) of one unit inside a source file.
struct SegmentRef {
  std::string unit;
  std::string audio_path;
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::string source_utt;

  std::int64_t length() const { return end - start; }
  bool operator==(const SegmentRef &) const = default;
};

using SegmentMap = std::map<std::string, std::vector<SegmentRef>>;

struct SegmentInventory {
  SegmentMap words;
  SegmentMap phones;
  int sample_rate = 0;  // 0 while empty

  bool operator==(const SegmentInventory &) const = default;
};

enum class UnitLevel { kWord, kPhone };
UnitLevel ParseUnitLevel(const std::string &name);

// Start rounds down and end rounds up; a 1e-6 sample slack absorbs decimal
// round-off so "0.10 0.20" at 16 kHz lands on [1600, 4800).
std::int64_t StartSample(double seconds, int rate);
std::int64_t EndSample(double seconds, int rate);

// Lazily loaded, shared source audio. Safe to use from several threads.
class AudioStore {
 public:
  const WavAudio &Get(const std::string &path);

 private:
  std::mutex mu_;
  std::map<std::string, WavAudio> cache_;
};

// One SegmentRef per row, audio at <audio_dir>/<utt_id>.wav. Missing audio is
// an I/O error; rows outside their file are collected into one data error.
SegmentInventory BuildInventory(const std::vector<CtmRow> &rows,
                                const std::filesystem::path &audio_dir, UnitLevel level,
                                AudioStore *store);
// Union of a word-level and a phone-level inventory.
SegmentInventory MergeInventories(const SegmentInventory &a, const SegmentInventory &b);

std::string InventoryToJson(const SegmentInventory &inv);
SegmentInventory InventoryFromJson(const std::string &text);

// Uniform choice among the unit's segments. kLookup when absent.
const SegmentRef &SampleSegment(const std::string &unit, const SegmentMap &map, Rng *rng);

struct SpliceRecipe {
  std::vector<std::string> text;
  std::vector<SegmentRef> segments;
  std::uint64_t seed = 0;

  bool operator==(const SpliceRecipe &) const = default;
};

std::string RecipeToJson(const SpliceRecipe &recipe);
SpliceRecipe RecipeFromJson(const std::string &text);

struct SpliceResult {
  WavAudio audio;
  SpliceRecipe recipe;
};

// Words found in the word map take one segment; other words fall back to one
// segment per phone of their pronunciation. kUnresolvable names the word
// otherwise. Samples are concatenated as-is.
SpliceResult SpliceUtterance(const std::vector<std::string> &text,
                             const SegmentInventory &inventory, const Lexicon &lexicon,
                             std::uint64_t seed, AudioStore *store);

// Concatenates the recorded segments again.
WavAudio ReplayRecipe(const SpliceRecipe &recipe, int sample_rate, AudioStore *store);

// Words of `text` that SpliceUtterance cannot build.
std::vector<std::string> UnresolvableWords(const std::vector<std::string> &text,
                                           const SegmentInventory &inventory,
                                           const Lexicon &lexicon);

struct AdaptationSetOptions {
  double mix_ratio = 1.0;  // real utterances per spliced one
  std::uint64_t seed = 1;
  bool skip_unresolvable = false;
};

struct AdaptationSet {
  std::vector<ManifestRow> rows;
  std::vector<std::string> skipped;  // "<text index>: <word>" per dropped text
};

// Writes <out_dir>/audio/spliced_NNNNN.wav and <out_dir>/manifest.jsonl.
// |real| = round(ratio * |spliced|), capped by the real corpus size.
AdaptationSet BuildAdaptationSet(const std::vector<std::vector<std::string>> &texts,
                                 const SegmentInventory &inventory, const Lexicon &lexicon,
                                 const std::vector<ManifestRow> &real_corpus,
                                 const AdaptationSetOptions &options,
                                 const std::filesystem::path &out_dir, AudioStore *store);

}  // namespace rnntk

#endif  // RNNTK_SPLICER_SPLICER_H_
