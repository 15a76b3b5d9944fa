// include/rnntk/transducer/trainer.h
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

#ifndef RNNTK_TRANSDUCER_TRAINER_H_
#define RNNTK_TRANSDUCER_TRAINER_H_

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rnntk/transducer/model.h"

namespace rnntk {

enum class TrainMode { kRnntOnly, kMtl, kCeBranchOnly };

TrainMode ParseTrainMode(const std::string &name);
const char *TrainModeName(TrainMode mode);

struct Utterance {
  std::string id;
  Sequence features;
  std::vector<TokenId> tokens;
  std::vector<int> phone_targets;  // one phone id per frame; empty if unknown
  std::string origin = "real";     // "real" or "spliced"
};

struct TrainOptions {
  TrainMode mode = TrainMode::kRnntOnly;
  double alpha = 0.1;
  double lr = 0.05;
  // Global gradient-norm clip over the updated blocks; <= 0 disables it.
  double clip_norm = 5.0;
  std::set<std::string> frozen_groups;
};

struct BatchLoss {
  double rnnt = 0.0;       // mean over utterances (0 in ce-branch-only mode)
  double ce = 0.0;         // mean summed frame CE (0 in rnnt-only mode)
  double objective = 0.0;  // what the step minimizes
};

// Mean objective over the batch; no gradients.
BatchLoss EvaluateBatch(const TransducerModel &model, std::span<const Utterance> batch,
                        TrainMode mode, double alpha);

// Accumulates d(mean objective)/d(params) into *grad (same shape as model).
BatchLoss ComputeGradients(const TransducerModel &model, std::span<const Utterance> batch,
                           TrainMode mode, double alpha, TransducerModel *grad);

// One SGD update. Blocks in frozen groups are not touched; ce-branch-only mode
// additionally freezes everything outside the phone branch.
BatchLoss TrainStep(TransducerModel *model, std::span<const Utterance> batch,
                    const TrainOptions &options);

struct FitOptions {
  TrainOptions step;
  std::size_t epochs = 10;
  std::size_t batch_size = 8;
  std::uint64_t seed = 1;
};

// Epoch loop with seeded shuffling. Returns the mean training loss per epoch.
std::vector<BatchLoss> Fit(TransducerModel *model, std::span<const Utterance> data,
                           const FitOptions &options,
                           const std::function<void(std::size_t, const BatchLoss &)>
                               &on_epoch = {});

struct AdaptOptions {
  std::size_t freeze_lower = 1;
  double lr = 0.05;
  std::size_t steps = 100;
  std::size_t batch_size = 8;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
};

// Domain adaptation on a spliced + real mixture: the lowest `freeze_lower`
// encoder layers stay fixed, everything else takes rnnt-only steps.
TransducerModel Adapt(const TransducerModel &model, std::span<const Utterance> mixed,
                      const AdaptOptions &options);

}  // namespace rnntk

#endif  // RNNTK_TRANSDUCER_TRAINER_H_
