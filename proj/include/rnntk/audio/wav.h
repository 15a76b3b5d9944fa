// include/rnntk/audio/wav.h
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

#ifndef RNNTK_AUDIO_WAV_H_
#define RNNTK_AUDIO_WAV_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rnntk {

// Mono 16-bit PCM.
struct WavAudio {
  int sample_rate = 16000;
  std::vector<std::int16_t> samples;

  bool operator==(const WavAudio &) const = default;
};

std::string EncodeWav(const WavAudio &audio);
// Accepts canonical RIFF/WAVE with a PCM fmt chunk, 1 channel, 16 bits.
// Unknown chunks before "data" are skipped.
WavAudio DecodeWav(const std::string &bytes, const std::string &what = "wav");

WavAudio ReadWav(const std::filesystem::path &path);
void WriteWav(const std::filesystem::path &path, const WavAudio &audio);

}  // namespace rnntk

#endif  // RNNTK_AUDIO_WAV_H_
