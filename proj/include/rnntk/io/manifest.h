// include/rnntk/io/manifest.h
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

#ifndef RNNTK_IO_MANIFEST_H_
#define RNNTK_IO_MANIFEST_H_

#include <filesystem>
#include <string>
#include <vector>

namespace rnntk {

// One JSON object per line: {utt_id, audio_path, text, origin, recipe?}.
struct ManifestRow {
  std::string utt_id;
  std::string audio_path;
  std::string text;             // space-separated words
  std::string origin = "real";  // "real" or "spliced"
  std::string recipe_json;      // serialized recipe object, empty if none

  bool operator==(const ManifestRow &) const = default;
};

std::string ManifestRowToJson(const ManifestRow &row);
ManifestRow ManifestRowFromJson(const std::string &line, const std::string &where = "manifest");

std::vector<ManifestRow> ReadManifest(const std::filesystem::path &path);
std::string FormatManifest(const std::vector<ManifestRow> &rows);
void WriteManifest(const std::filesystem::path &path, const std::vector<ManifestRow> &rows);

// Relative audio paths resolve against the manifest's directory.
std::filesystem::path ResolveAudioPath(const std::filesystem::path &manifest,
                                       const std::string &audio_path);

}  // namespace rnntk

#endif  // RNNTK_IO_MANIFEST_H_
