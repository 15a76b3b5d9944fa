// src/errors.cc
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

#include "rnntk/errors.h"

namespace rnntk {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kContract: return "contract error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kLexicon: return "lexicon error";
    case ErrorKind::kLookup: return "lookup miss";
    case ErrorKind::kUnresolvable: return "unresolvable word";
    case ErrorKind::kInfeasible: return "infeasible alignment";
    case ErrorKind::kTokenization: return "tokenization error";
    case ErrorKind::kEvaluation: return "evaluation error";
    case ErrorKind::kTraining: return "training error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
      kind_(kind) {}

void Fail(ErrorKind kind, const std::string &message) {
  throw Error(kind, message);
}

}  // namespace rnntk
