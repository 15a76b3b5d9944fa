// include/rnntk/io/ctm.h
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

#ifndef RNNTK_IO_CTM_H_
#define RNNTK_IO_CTM_H_

#include <filesystem>
#include <string>
#include <vector>

namespace rnntk {

// `utt_id channel start_sec dur_sec unit`
struct CtmRow {
  std::string utt_id;
  int channel = 1;
  double start = 0.0;
  double duration = 0.0;
  std::string unit;
  std::size_t line = 0;  // 1-based source line, 0 when built in memory

  bool operator==(const CtmRow &o) const {
    return utt_id == o.utt_id && channel == o.channel && start == o.start &&
           duration == o.duration && unit == o.unit;
  }
};

std::vector<CtmRow> ParseCtm(const std::string &text, const std::string &what = "ctm");
std::vector<CtmRow> ReadCtm(const std::filesystem::path &path);

// Times printed with `decimals` places.
std::string FormatCtm(const std::vector<CtmRow> &rows, int decimals = 3);
void WriteCtm(const std::filesystem::path &path, const std::vector<CtmRow> &rows,
              int decimals = 3);

}  // namespace rnntk

#endif  // RNNTK_IO_CTM_H_
