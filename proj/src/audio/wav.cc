// src/audio/wav.cc
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

#include "rnntk/audio/wav.h"

#include <cstring>

#include "rnntk/errors.h"
#include "rnntk/io/file_util.h"

namespace rnntk {

namespace {

void PutU32(std::string *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string *out, std::uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>(v >> 8));
}

std::uint32_t GetU32(const std::string &b, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[pos + i]);
  return v;
}

std::uint16_t GetU16(const std::string &b, std::size_t pos) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[pos]) |
                                    (static_cast<unsigned char>(b[pos + 1]) << 8));
}

}  // namespace

std::string EncodeWav(const WavAudio &audio) {
  Require(audio.sample_rate > 0, ErrorKind::kContract, "sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutU32(&out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<std::uint32_t>(audio.sample_rate));
  PutU32(&out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  out += "data";
  PutU32(&out, data_bytes);
  for (std::int16_t s : audio.samples) PutU16(&out, static_cast<std::uint16_t>(s));
  return out;
}

WavAudio DecodeWav(const std::string &bytes, const std::string &what) {
  auto bad = [&](const std::string &msg) { Fail(ErrorKind::kData, what + ": " + msg); };
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    bad("not a RIFF/WAVE file");
  }
  WavAudio audio;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t size = GetU32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) bad("chunk '" + id + "' runs past end of file");
    if (id == "fmt ") {
      if (size < 16) bad("short fmt chunk");
      if (GetU16(bytes, body) != 1) bad("only PCM is supported");
      if (GetU16(bytes, body + 2) != 1) bad("only mono is supported");
      if (GetU16(bytes, body + 14) != 16) bad("only 16-bit samples are supported");
      audio.sample_rate = static_cast<int>(GetU32(bytes, body + 4));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) bad("data chunk before fmt chunk");
      if (size % 2 != 0) bad("odd data chunk size");
      audio.samples.resize(size / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        audio.samples[i] = static_cast<std::int16_t>(GetU16(bytes, body + 2 * i));
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  Fail(ErrorKind::kData, what + ": no data chunk");
}

WavAudio ReadWav(const std::filesystem::path &path) {
  return DecodeWav(ReadFileBytes(path), path.string());
}

void WriteWav(const std::filesystem::path &path, const WavAudio &audio) {
  WriteFileAtomic(path, EncodeWav(audio));
}

}  // namespace rnntk
