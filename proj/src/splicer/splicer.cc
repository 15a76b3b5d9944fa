// src/splicer/splicer.cc
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

#include "rnntk/splicer/splicer.h"

#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "rnntk/errors.h"
#include "rnntk/io/file_util.h"

namespace rnntk {

using nlohmann::ordered_json;

namespace {

constexpr double kSampleSlack = 1e-6;

ordered_json SegmentToJson(const SegmentRef &s, bool with_unit) {
  ordered_json j;
  if (with_unit) j["unit"] = s.unit;
  j["audio_path"] = s.audio_path;
  j["start"] = s.start;
  j["end"] = s.end;
  j["source_utt"] = s.source_utt;
  return j;
}

SegmentRef SegmentFromJson(const ordered_json &j, const std::string &unit) {
  SegmentRef s;
  s.unit = j.contains("unit") ? j["unit"].get<std::string>() : unit;
  s.audio_path = j.at("audio_path").get<std::string>();
  s.start = j.at("start").get<std::int64_t>();
  s.end = j.at("end").get<std::int64_t>();
  s.source_utt = j.at("source_utt").get<std::string>();
  Require(s.start >= 0 && s.start < s.end, ErrorKind::kData,
          "segment of '" + s.unit + "' has an empty or negative range");
  return s;
}

ordered_json MapToJson(const SegmentMap &map) {
  ordered_json j = ordered_json::object();
  for (const auto &[unit, refs] : map) {
    ordered_json list = ordered_json::array();
    for (const SegmentRef &r : refs) list.push_back(SegmentToJson(r, false));
    j[unit] = list;
  }
  return j;
}

SegmentMap MapFromJson(const ordered_json &j) {
  SegmentMap map;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::vector<SegmentRef> &refs = map[it.key()];
    for (const ordered_json &s : it.value()) refs.push_back(SegmentFromJson(s, it.key()));
    Require(!refs.empty(), ErrorKind::kData, "unit '" + it.key() + "' has no segments");
  }
  return map;
}

void AppendSegment(const SegmentRef &seg, int sample_rate, AudioStore *store,
                   std::vector<std::int16_t> *out) {
  const WavAudio &src = store->Get(seg.audio_path);
  Require(src.sample_rate == sample_rate, ErrorKind::kData,
          seg.audio_path + " has rate " + std::to_string(src.sample_rate) + ", expected " +
              std::to_string(sample_rate));
  Require(seg.start >= 0 && seg.start < seg.end &&
              seg.end <= static_cast<std::int64_t>(src.samples.size()),
          ErrorKind::kData, "segment [" + std::to_string(seg.start) + ", " +
                                std::to_string(seg.end) + ") outside " + seg.audio_path);
  out->insert(out->end(), src.samples.begin() + seg.start, src.samples.begin() + seg.end);
}

std::string JoinWords(const std::vector<std::string> &words) {
  std::string out;
  for (const std::string &w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

UnitLevel ParseUnitLevel(const std::string &name) {
  if (name == "word") return UnitLevel::kWord;
  if (name == "phone") return UnitLevel::kPhone;
  Fail(ErrorKind::kConfig, "unit level must be word or phone, got '" + name + "'");
}

std::int64_t StartSample(double seconds, int rate) {
  return static_cast<std::int64_t>(std::floor(seconds * rate + kSampleSlack));
}

std::int64_t EndSample(double seconds, int rate) {
  return static_cast<std::int64_t>(std::ceil(seconds * rate - kSampleSlack));
}

const WavAudio &AudioStore::Get(const std::string &path) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(path);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(path, ReadWav(path)).first->second;
}

SegmentInventory BuildInventory(const std::vector<CtmRow> &rows,
                                const std::filesystem::path &audio_dir, UnitLevel level,
                                AudioStore *store) {
  SegmentInventory inv;
  SegmentMap &map = level == UnitLevel::kWord ? inv.words : inv.phones;
  std::string bad_rows;
  std::size_t bad_count = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CtmRow &row = rows[i];
    const std::filesystem::path path = audio_dir / (row.utt_id + ".wav");
    if (!std::filesystem::exists(path)) {
      Fail(ErrorKind::kIo, "no audio for '" + row.utt_id + "' at " + path.string());
    }
    const WavAudio &audio = store->Get(path.string());
    if (inv.sample_rate == 0) inv.sample_rate = audio.sample_rate;
    Require(audio.sample_rate == inv.sample_rate, ErrorKind::kData,
            path.string() + " sample rate differs from the rest of the inventory");
    SegmentRef seg{row.unit, path.string(), StartSample(row.start, audio.sample_rate),
                   EndSample(row.start + row.duration, audio.sample_rate), row.utt_id};
    if (row.start < 0.0 || row.duration <= 0.0 || seg.start >= seg.end ||
        seg.end > static_cast<std::int64_t>(audio.samples.size())) {
      ++bad_count;
      if (bad_count <= 20) {
        bad_rows += "\n  row " + std::to_string(row.line != 0 ? row.line : i + 1) + ": " +
                    row.utt_id + " " + FormatFixed(row.start, 3) + " " +
                    FormatFixed(row.duration, 3) + " " + row.unit;
      }
      continue;
    }
    map[row.unit].push_back(std::move(seg));
  }
  if (bad_count > 0) {
    Fail(ErrorKind::kData, std::to_string(bad_count) +
                               " alignment row(s) fall outside their audio:" + bad_rows);
  }
  return inv;
}

SegmentInventory MergeInventories(const SegmentInventory &a, const SegmentInventory &b) {
  Require(a.sample_rate == 0 || b.sample_rate == 0 || a.sample_rate == b.sample_rate,
          ErrorKind::kData, "inventories have different sample rates");
  SegmentInventory out = a;
  if (out.sample_rate == 0) out.sample_rate = b.sample_rate;
  for (const auto &[unit, refs] : b.words) {
    auto &dst = out.words[unit];
    dst.insert(dst.end(), refs.begin(), refs.end());
  }
  for (const auto &[unit, refs] : b.phones) {
    auto &dst = out.phones[unit];
    dst.insert(dst.end(), refs.begin(), refs.end());
  }
  return out;
}

std::string InventoryToJson(const SegmentInventory &inv) {
  ordered_json j;
  j["sample_rate"] = inv.sample_rate;
  j["words"] = MapToJson(inv.words);
  j["phones"] = MapToJson(inv.phones);
  return j.dump(1) + "\n";
}

SegmentInventory InventoryFromJson(const std::string &text) {
  try {
    ordered_json j = ordered_json::parse(text);
    SegmentInventory inv;
    inv.sample_rate = j.at("sample_rate").get<int>();
    inv.words = MapFromJson(j.at("words"));
    inv.phones = MapFromJson(j.at("phones"));
    return inv;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kData, std::string("bad inventory: ") + e.what());
  }
}

const SegmentRef &SampleSegment(const std::string &unit, const SegmentMap &map, Rng *rng) {
  auto it = map.find(unit);
  if (it == map.end() || it->second.empty()) {
    Fail(ErrorKind::kLookup, "no segments for unit '" + unit + "'");
  }
  return it->second[rng->UniformIndex(it->second.size())];
}

std::string RecipeToJson(const SpliceRecipe &recipe) {
  ordered_json j;
  j["seed"] = recipe.seed;
  j["text"] = recipe.text;
  ordered_json segs = ordered_json::array();
  for (const SegmentRef &s : recipe.segments) segs.push_back(SegmentToJson(s, true));
  j["segments"] = segs;
  return j.dump();
}

SpliceRecipe RecipeFromJson(const std::string &text) {
  try {
    ordered_json j = ordered_json::parse(text);
    SpliceRecipe r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.text = j.at("text").get<std::vector<std::string>>();
    for (const ordered_json &s : j.at("segments")) r.segments.push_back(SegmentFromJson(s, ""));
    return r;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kData, std::string("bad splice recipe: ") + e.what());
  }
}

std::vector<std::string> UnresolvableWords(const std::vector<std::string> &text,
                                           const SegmentInventory &inventory,
                                           const Lexicon &lexicon) {
  std::vector<std::string> out;
  for (const std::string &word : text) {
    if (inventory.words.count(word) > 0) continue;
    bool ok = lexicon.Contains(word);
    if (ok) {
      for (const std::string &p : lexicon.Pronunciation(word)) {
        if (inventory.phones.count(p) == 0) ok = false;
      }
    }
    if (!ok) out.push_back(word);
  }
  return out;
}

SpliceResult SpliceUtterance(const std::vector<std::string> &text,
                             const SegmentInventory &inventory, const Lexicon &lexicon,
                             std::uint64_t seed, AudioStore *store) {
  std::vector<std::string> missing = UnresolvableWords(text, inventory, lexicon);
  if (!missing.empty()) {
    Fail(ErrorKind::kUnresolvable, "cannot splice word(s): " + JoinWords(missing));
  }
  SpliceResult out;
  out.audio.sample_rate = inventory.sample_rate;
  out.recipe.text = text;
  out.recipe.seed = seed;
  Rng rng(seed);
  for (const std::string &word : text) {
    if (inventory.words.count(word) > 0) {
      out.recipe.segments.push_back(SampleSegment(word, inventory.words, &rng));
    } else {
      for (const std::string &p : lexicon.Pronunciation(word)) {
        out.recipe.segments.push_back(SampleSegment(p, inventory.phones, &rng));
      }
    }
  }
  for (const SegmentRef &seg : out.recipe.segments) {
    AppendSegment(seg, inventory.sample_rate, store, &out.audio.samples);
  }
  return out;
}

WavAudio ReplayRecipe(const SpliceRecipe &recipe, int sample_rate, AudioStore *store) {
  WavAudio out;
  out.sample_rate = sample_rate;
  for (const SegmentRef &seg : recipe.segments) {
    AppendSegment(seg, sample_rate, store, &out.samples);
  }
  return out;
}

AdaptationSet BuildAdaptationSet(const std::vector<std::vector<std::string>> &texts,
                                 const SegmentInventory &inventory, const Lexicon &lexicon,
                                 const std::vector<ManifestRow> &real_corpus,
                                 const AdaptationSetOptions &options,
                                 const std::filesystem::path &out_dir, AudioStore *store) {
  Require(options.mix_ratio >= 0.0 && std::isfinite(options.mix_ratio), ErrorKind::kConfig,
          "mix ratio must be >= 0");
  AdaptationSet result;
  std::string abort_report;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    std::vector<std::string> missing = UnresolvableWords(texts[i], inventory, lexicon);
    for (const std::string &w : missing) {
      const std::string entry = std::to_string(i) + ": " + w;
      if (options.skip_unresolvable) {
        result.skipped.push_back(entry);
      } else {
        abort_report += "\n  text " + entry;
      }
    }
  }
  if (!abort_report.empty()) {
    Fail(ErrorKind::kUnresolvable, "unresolvable words in adaptation texts:" + abort_report);
  }

  std::vector<ManifestRow> rows;
  std::size_t index = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!UnresolvableWords(texts[i], inventory, lexicon).empty()) continue;
    const std::uint64_t seed = DeriveSeed(options.seed, "splice", i);
    SpliceResult sp = SpliceUtterance(texts[i], inventory, lexicon, seed, store);
    char name[32];
    std::snprintf(name, sizeof(name), "spliced_%05zu", index++);
    const std::string rel = std::string("audio/") + name + ".wav";
    WriteWav(out_dir / rel, sp.audio);
    rows.push_back({name, rel, JoinWords(texts[i]), "spliced", RecipeToJson(sp.recipe)});
  }

  const std::size_t wanted =
      static_cast<std::size_t>(std::llround(options.mix_ratio * static_cast<double>(rows.size())));
  const std::size_t n_real = std::min(wanted, real_corpus.size());
  std::vector<std::size_t> order(real_corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng pick(DeriveSeed(options.seed, "real-pick"));
  Shuffle(&order, &pick);
  for (std::size_t i = 0; i < n_real; ++i) {
    ManifestRow row = real_corpus[order[i]];
    row.origin = "real";
    row.recipe_json.clear();
    rows.push_back(std::move(row));
  }
  Rng mix(DeriveSeed(options.seed, "mix"));
  Shuffle(&rows, &mix);
  WriteManifest(out_dir / "manifest.jsonl", rows);
  result.rows = std::move(rows);
  return result;
}

}  // namespace rnntk
