// include/rnntk/transducer/checkpoint.h
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

#ifndef RNNTK_TRANSDUCER_CHECKPOINT_H_
#define RNNTK_TRANSDUCER_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "rnntk/transducer/decoder.h"
#include "rnntk/transducer/model.h"

namespace rnntk {

// Directory of <param>.tdm matrix files plus model.json describing layer
// names, dimensions, vocabulary, blank id, phone list and the shared depth.
void SaveModel(const std::filesystem::path &dir, const TransducerModel &model);
TransducerModel LoadModel(const std::filesystem::path &dir);

// One JSON object per line:
// {utt_id, hyps:[{tokens, token_ids, logp, emit_frames, wp_logp, neg_entropy,
//                 emitted_count, hyp_logp, emitted_counts}]}
std::string NBestToJsonLine(const NBestList &nbest, const Vocabulary &vocab);
NBestList NBestFromJsonLine(const std::string &line);

}  // namespace rnntk

#endif  // RNNTK_TRANSDUCER_CHECKPOINT_H_
