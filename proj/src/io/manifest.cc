// src/io/manifest.cc
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

#include "rnntk/io/manifest.h"

#include <sstream>

#include "json.hpp"
#include "rnntk/errors.h"
#include "rnntk/io/file_util.h"

namespace rnntk {

using nlohmann::ordered_json;

std::string ManifestRowToJson(const ManifestRow &row) {
  ordered_json j;
  j["utt_id"] = row.utt_id;
  j["audio_path"] = row.audio_path;
  j["text"] = row.text;
  j["origin"] = row.origin;
  if (!row.recipe_json.empty()) j["recipe"] = ordered_json::parse(row.recipe_json);
  return j.dump();
}

ManifestRow ManifestRowFromJson(const std::string &line, const std::string &where) {
  try {
    ordered_json j = ordered_json::parse(line);
    ManifestRow row;
    row.utt_id = j.at("utt_id").get<std::string>();
    row.audio_path = j.at("audio_path").get<std::string>();
    row.text = j.at("text").get<std::string>();
    row.origin = j.value("origin", std::string("real"));
    Require(row.origin == "real" || row.origin == "spliced", ErrorKind::kData,
            where + ": origin must be real or spliced");
    if (j.contains("recipe")) row.recipe_json = j["recipe"].dump();
    return row;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kData, where + ": " + e.what());
  }
}

std::vector<ManifestRow> ReadManifest(const std::filesystem::path &path) {
  std::istringstream in(ReadFileBytes(path));
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(ManifestRowFromJson(line, path.string() + ":" + std::to_string(lineno)));
  }
  return rows;
}

std::string FormatManifest(const std::vector<ManifestRow> &rows) {
  std::string out;
  for (const ManifestRow &r : rows) out += ManifestRowToJson(r) + "\n";
  return out;
}

void WriteManifest(const std::filesystem::path &path, const std::vector<ManifestRow> &rows) {
  WriteFileAtomic(path, FormatManifest(rows));
}

std::filesystem::path ResolveAudioPath(const std::filesystem::path &manifest,
                                       const std::string &audio_path) {
  std::filesystem::path p(audio_path);
  if (p.is_absolute()) return p;
  return manifest.parent_path() / p;
}

}  // namespace rnntk
