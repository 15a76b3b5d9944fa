// include/rnntk/transducer/model.h
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

#ifndef RNNTK_TRANSDUCER_MODEL_H_
#define RNNTK_TRANSDUCER_MODEL_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rnntk/numcore/layers.h"
#include "rnntk/numcore/matrix.h"
#include "rnntk/numcore/rng.h"
#include "rnntk/transducer/rnnt_loss.h"
#include "rnntk/transducer/vocabulary.h"

namespace rnntk {

struct ModelConfig {
  std::size_t input_dim = 12;
  std::size_t encoder_layers = 3;
  // Encoder layers below the phone-branch tap point. Equal to encoder_layers
  // means the branch sits on top of the full encoder.
  std::size_t shared_layers = 1;
  std::size_t encoder_hidden = 32;
  std::size_t prediction_layers = 1;
  std::size_t prediction_hidden = 32;
  std::size_t embedding_dim = 16;
  std::size_t joint_dim = 32;
  bool phone_branch = true;
  std::size_t branch_layers = 1;
  std::size_t branch_hidden = 32;
};

struct PhoneBranch {
  std::vector<RecurrentLayer> layers;
  DenseLayer output;  // phones x hidden
  bool operator==(const PhoneBranch &) const = default;
};

// A named view on one parameter array. `group` is the freeze unit (a layer).
struct ParamBlock {
  std::string group;
  std::string name;
  std::span<double> values;
};

struct ConstParamBlock {
  std::string group;
  std::string name;
  std::span<const double> values;
};

struct TransducerModel {
  Vocabulary vocab;
  std::vector<std::string> phones;
  std::size_t input_dim = 0;
  std::vector<RecurrentLayer> encoder_lower;
  std::vector<RecurrentLayer> encoder_upper;
  Matrix embedding;  // vocab x embedding_dim; row = token id
  std::vector<RecurrentLayer> prediction;
  DenseLayer joint;   // joint_dim x (encoder_hidden + prediction_hidden)
  DenseLayer output;  // vocab x joint_dim
  std::optional<PhoneBranch> phone_branch;

  static TransducerModel Create(const ModelConfig &config, Vocabulary vocab,
                                std::vector<std::string> phones, Rng *rng);

  std::size_t EncoderDepth() const { return encoder_lower.size() + encoder_upper.size(); }
  std::size_t EncoderDim() const;
  std::size_t PredictionDim() const;
  std::size_t LowerDim() const;
  const RecurrentLayer &EncoderLayer(std::size_t i) const;

  void Validate() const;
  // Same shapes, every parameter zero.
  TransducerModel ZerosLike() const;

  std::vector<ParamBlock> Params();
  std::vector<ConstParamBlock> Params() const;

  bool operator==(const TransducerModel &) const = default;
};

// Parameter group names.
std::string EncoderGroup(std::size_t layer);
inline constexpr const char *kEmbeddingGroup = "embedding";
std::string PredictionGroup(std::size_t layer);
inline constexpr const char *kJointGroup = "joint";
inline constexpr const char *kOutputGroup = "output";
std::string BranchGroup(std::size_t layer);
inline constexpr const char *kBranchOutputGroup = "phone_branch.output";

bool IsBranchGroup(const std::string &group);

// Per-layer outputs kept for backpropagation.
struct EncoderTrace {
  Sequence input;
  std::vector<Sequence> layer_outputs;  // lower layers first, then upper
};

struct EncoderOutput {
  Sequence lower;  // tap point consumed by the phone branch
  Sequence final;  // h_enc
};

EncoderOutput Encode(const Sequence &features, const TransducerModel &model,
                     EncoderTrace *trace = nullptr);

struct PredictionTrace {
  Sequence input;  // zero start vector then embeddings of the history
  std::vector<Sequence> layer_outputs;
};

// Output index u is the state after consuming u labels (u = 0 is the start).
Sequence Predict(std::span<const TokenId> history, const TransducerModel &model,
                 PredictionTrace *trace = nullptr);

// Joint network logits for every (t, u), laid out [t][u][k].
struct JointActivations {
  std::size_t frames = 0;
  std::size_t positions = 0;  // U + 1
  Vector hidden;              // z_{t,u}, [t][u][j]
  Vector logits;              // h_{t,u}, [t][u][k]
};

JointActivations JointForward(const Sequence &h_enc, const Sequence &h_pre,
                              const TransducerModel &model);

PosteriorLattice JointPosteriors(const Sequence &h_enc, const Sequence &h_pre,
                                 const TransducerModel &model);

// Frames x phones; each row is a distribution over CI phones.
using PhonePosteriorgram = Matrix;

struct BranchTrace {
  std::vector<Sequence> layer_outputs;
  Sequence logits;
};

// Posteriorgram from the branch applied to lower encoder states.
PhonePosteriorgram CiPhoneForward(const Sequence &lower_states,
                                  const TransducerModel &model,
                                  BranchTrace *trace = nullptr);

// alpha * ce + (1 - alpha) * rnnt, alpha in [0, 1].
double MtlLoss(double rnnt_loss, double ce_loss, double alpha);

}  // namespace rnntk

#endif  // RNNTK_TRANSDUCER_MODEL_H_
