// src/numcore/matrix_io.cc
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

#include "rnntk/numcore/matrix_io.h"

#include <bit>
#include <cstdint>
#include <cstring>

#include "rnntk/errors.h"
#include "rnntk/io/file_util.h"

namespace rnntk {

namespace {

constexpr char kMagic[4] = {'T', 'D', 'M', '1'};

void PutU32(std::uint32_t v, std::string *out) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU64(std::uint64_t v, std::string *out) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetLE(const std::string &bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace

std::string EncodeMatrix(const Matrix &m) {
  std::string out(kMagic, 4);
  out.reserve(12 + 8 * m.size());
  PutU32(static_cast<std::uint32_t>(m.rows()), &out);
  PutU32(static_cast<std::uint32_t>(m.cols()), &out);
  for (double v : m.values()) PutU64(std::bit_cast<std::uint64_t>(v), &out);
  return out;
}

Matrix DecodeMatrix(const std::string &bytes) {
  Require(bytes.size() >= 12 && std::memcmp(bytes.data(), kMagic, 4) == 0,
          ErrorKind::kData, "not a TDM1 matrix");
  const auto rows = static_cast<std::size_t>(GetLE(bytes, 4, 4));
  const auto cols = static_cast<std::size_t>(GetLE(bytes, 8, 4));
  Require(bytes.size() == 12 + 8 * rows * cols, ErrorKind::kData,
          "TDM1 payload length does not match " + std::to_string(rows) + "x" +
              std::to_string(cols));
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<double>(GetLE(bytes, 12 + 8 * i, 8));
  }
  return Matrix(rows, cols, std::move(data));
}

void WriteMatrixFile(const std::filesystem::path &path, const Matrix &m) {
  WriteFileAtomic(path, EncodeMatrix(m));
}

Matrix ReadMatrixFile(const std::filesystem::path &path) {
  return DecodeMatrix(ReadFileBytes(path));
}

}  // namespace rnntk
