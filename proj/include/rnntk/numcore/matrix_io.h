// include/rnntk/numcore/matrix_io.h
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

#ifndef RNNTK_NUMCORE_MATRIX_IO_H_
#define RNNTK_NUMCORE_MATRIX_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rnntk/numcore/matrix.h"

namespace rnntk {

// Binary layout: "TDM1", u32 LE rows, u32 LE cols, rows*cols f64 LE row-major.
std::string EncodeMatrix(const Matrix &m);
Matrix DecodeMatrix(const std::string &bytes);

void WriteMatrixFile(const std::filesystem::path &path, const Matrix &m);
Matrix ReadMatrixFile(const std::filesystem::path &path);

}  // namespace rnntk

#endif  // RNNTK_NUMCORE_MATRIX_IO_H_
