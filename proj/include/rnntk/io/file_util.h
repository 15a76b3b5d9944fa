// include/rnntk/io/file_util.h
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

#ifndef RNNTK_IO_FILE_UTIL_H_
#define RNNTK_IO_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <vector>

namespace rnntk {

std::string ReadFileBytes(const std::filesystem::path &path);

// Writes to a sibling temp file and renames it into place so concurrent
// readers never see a partial file.
void WriteFileAtomic(const std::filesystem::path &path, const std::string &bytes);

// Non-empty, non-comment lines. '#' starts a comment only at line start.
std::vector<std::string> ReadLines(const std::filesystem::path &path);

std::vector<std::string> SplitWhitespace(const std::string &line);

// Fixed-point decimal formatting ("%.*f"), independent of stream locale state.
std::string FormatFixed(double value, int decimals);

}  // namespace rnntk

#endif  // RNNTK_IO_FILE_UTIL_H_
