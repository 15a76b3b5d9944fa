// src/transducer/model.cc
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

#include "rnntk/transducer/model.h"

#include <cmath>

#include "rnntk/errors.h"
#include "rnntk/numcore/ops.h"

namespace rnntk {

std::string EncoderGroup(std::size_t layer) { return "encoder." + std::to_string(layer); }
std::string PredictionGroup(std::size_t layer) {
  return "prediction." + std::to_string(layer);
}
std::string BranchGroup(std::size_t layer) { return "phone_branch." + std::to_string(layer); }

bool IsBranchGroup(const std::string &group) { return group.starts_with("phone_branch."); }

TransducerModel TransducerModel::Create(const ModelConfig &config, Vocabulary vocab,
                                        std::vector<std::string> phones, Rng *rng) {
  Require(config.encoder_layers >= 1, ErrorKind::kConfig, "encoder needs at least one layer");
  Require(config.shared_layers >= 1 && config.shared_layers <= config.encoder_layers,
          ErrorKind::kConfig, "shared_layers must be within [1, encoder_layers]");
  Require(config.prediction_layers >= 1, ErrorKind::kConfig,
          "prediction network needs at least one layer");
  Require(config.input_dim > 0 && vocab.size() >= 2, ErrorKind::kConfig,
          "input dim and vocabulary must be non-empty");

  TransducerModel m;
  m.vocab = std::move(vocab);
  m.phones = std::move(phones);
  m.input_dim = config.input_dim;
  std::size_t in = config.input_dim;
  for (std::size_t i = 0; i < config.encoder_layers; ++i) {
    RecurrentLayer layer = RecurrentLayer::Zeros(in, config.encoder_hidden);
    InitUniform(&layer, rng);
    (i < config.shared_layers ? m.encoder_lower : m.encoder_upper).push_back(std::move(layer));
    in = config.encoder_hidden;
  }
  m.embedding = Matrix(m.vocab.size(), config.embedding_dim);
  for (double &v : m.embedding.values()) v = rng->Uniform(-1.0, 1.0);
  for (double &v : m.embedding.Row(m.vocab.blank_id())) v = 0.0;
  in = config.embedding_dim;
  for (std::size_t i = 0; i < config.prediction_layers; ++i) {
    RecurrentLayer layer = RecurrentLayer::Zeros(in, config.prediction_hidden);
    InitUniform(&layer, rng);
    m.prediction.push_back(std::move(layer));
    in = config.prediction_hidden;
  }
  m.joint = DenseLayer::Zeros(config.encoder_hidden + config.prediction_hidden, config.joint_dim);
  InitUniform(&m.joint, rng);
  m.output = DenseLayer::Zeros(config.joint_dim, m.vocab.size());
  InitUniform(&m.output, rng);
  if (config.phone_branch) {
    Require(!m.phones.empty(), ErrorKind::kConfig, "phone branch needs a phone set");
    PhoneBranch branch;
    in = config.encoder_hidden;
    for (std::size_t i = 0; i < config.branch_layers; ++i) {
      RecurrentLayer layer = RecurrentLayer::Zeros(in, config.branch_hidden);
      InitUniform(&layer, rng);
      branch.layers.push_back(std::move(layer));
      in = config.branch_hidden;
    }
    branch.output = DenseLayer::Zeros(in, m.phones.size());
    InitUniform(&branch.output, rng);
    m.phone_branch = std::move(branch);
  }
  m.Validate();
  return m;
}

std::size_t TransducerModel::EncoderDim() const {
  return EncoderLayer(EncoderDepth() - 1).HiddenDim();
}

std::size_t TransducerModel::PredictionDim() const { return prediction.back().HiddenDim(); }

std::size_t TransducerModel::LowerDim() const { return encoder_lower.back().HiddenDim(); }

const RecurrentLayer &TransducerModel::EncoderLayer(std::size_t i) const {
  return i < encoder_lower.size() ? encoder_lower[i] : encoder_upper[i - encoder_lower.size()];
}

void TransducerModel::Validate() const {
  Require(!encoder_lower.empty(), ErrorKind::kShape, "model has no lower encoder layers");
  Require(!prediction.empty(), ErrorKind::kShape, "model has no prediction layers");
  std::size_t in = input_dim;
  for (std::size_t i = 0; i < EncoderDepth(); ++i) {
    const RecurrentLayer &l = EncoderLayer(i);
    l.Validate();
    Require(l.InputDim() == in, ErrorKind::kShape,
            "encoder layer " + std::to_string(i) + " input dim mismatch");
    in = l.HiddenDim();
  }
  Require(embedding.rows() == vocab.size(), ErrorKind::kShape, "embedding rows != vocab size");
  in = embedding.cols();
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    prediction[i].Validate();
    Require(prediction[i].InputDim() == in, ErrorKind::kShape,
            "prediction layer " + std::to_string(i) + " input dim mismatch");
    in = prediction[i].HiddenDim();
  }
  joint.Validate();
  Require(joint.InputDim() == EncoderDim() + PredictionDim(), ErrorKind::kShape,
          "joint input must be encoder dim + prediction dim");
  output.Validate();
  Require(output.InputDim() == joint.OutputDim(), ErrorKind::kShape, "output layer input dim");
  Require(output.OutputDim() == vocab.size(), ErrorKind::kShape, "output rows != vocab size");
  if (phone_branch) {
    in = LowerDim();
    for (const RecurrentLayer &l : phone_branch->layers) {
      l.Validate();
      Require(l.InputDim() == in, ErrorKind::kShape, "phone branch layer input dim");
      in = l.HiddenDim();
    }
    phone_branch->output.Validate();
    Require(phone_branch->output.InputDim() == in, ErrorKind::kShape,
            "phone branch output input dim");
    Require(phone_branch->output.OutputDim() == phones.size(), ErrorKind::kShape,
            "phone branch output rows != phone count");
  }
}

namespace {

void ZeroLayer(RecurrentLayer *l) {
  l->input_weight.SetZero();
  l->recurrent_weight.SetZero();
  std::fill(l->bias.begin(), l->bias.end(), 0.0);
}

void ZeroLayer(DenseLayer *l) {
  l->weight.SetZero();
  std::fill(l->bias.begin(), l->bias.end(), 0.0);
}

template <typename Block, typename Model>
std::vector<Block> CollectParams(Model &m) {
  std::vector<Block> out;
  auto add_rec = [&](const std::string &group, auto &layer) {
    out.push_back({group, group + ".input_weight", layer.input_weight.values()});
    out.push_back({group, group + ".recurrent_weight", layer.recurrent_weight.values()});
    out.push_back({group, group + ".bias", layer.bias});
  };
  auto add_dense = [&](const std::string &group, auto &layer) {
    out.push_back({group, group + ".weight", layer.weight.values()});
    out.push_back({group, group + ".bias", layer.bias});
  };
  std::size_t idx = 0;
  for (auto &l : m.encoder_lower) add_rec(EncoderGroup(idx++), l);
  for (auto &l : m.encoder_upper) add_rec(EncoderGroup(idx++), l);
  out.push_back({kEmbeddingGroup, "embedding.weight", m.embedding.values()});
  for (std::size_t i = 0; i < m.prediction.size(); ++i) add_rec(PredictionGroup(i), m.prediction[i]);
  add_dense(kJointGroup, m.joint);
  add_dense(kOutputGroup, m.output);
  if (m.phone_branch) {
    for (std::size_t i = 0; i < m.phone_branch->layers.size(); ++i) {
      add_rec(BranchGroup(i), m.phone_branch->layers[i]);
    }
    add_dense(kBranchOutputGroup, m.phone_branch->output);
  }
  return out;
}

}  // namespace

TransducerModel TransducerModel::ZerosLike() const {
  TransducerModel z = *this;
  for (auto &l : z.encoder_lower) ZeroLayer(&l);
  for (auto &l : z.encoder_upper) ZeroLayer(&l);
  z.embedding.SetZero();
  for (auto &l : z.prediction) ZeroLayer(&l);
  ZeroLayer(&z.joint);
  ZeroLayer(&z.output);
  if (z.phone_branch) {
    for (auto &l : z.phone_branch->layers) ZeroLayer(&l);
    ZeroLayer(&z.phone_branch->output);
  }
  return z;
}

std::vector<ParamBlock> TransducerModel::Params() {
  return CollectParams<ParamBlock>(*this);
}

std::vector<ConstParamBlock> TransducerModel::Params() const {
  return CollectParams<ConstParamBlock>(*this);
}

EncoderOutput Encode(const Sequence &features, const TransducerModel &model,
                     EncoderTrace *trace) {
  for (const Vector &f : features) {
    Require(f.size() == model.input_dim, ErrorKind::kShape,
            "feature dim " + std::to_string(f.size()) + " != model input dim " +
                std::to_string(model.input_dim));
  }
  EncoderOutput out;
  Sequence current = features;
  if (trace != nullptr) {
    trace->input = features;
    trace->layer_outputs.clear();
  }
  for (std::size_t i = 0; i < model.EncoderDepth(); ++i) {
    current = RecurrentForward(current, model.EncoderLayer(i));
    if (trace != nullptr) trace->layer_outputs.push_back(current);
    if (i + 1 == model.encoder_lower.size()) out.lower = current;
  }
  out.final = std::move(current);
  return out;
}

Sequence Predict(std::span<const TokenId> history, const TransducerModel &model,
                 PredictionTrace *trace) {
  Sequence inputs;
  inputs.reserve(history.size() + 1);
  inputs.emplace_back(model.embedding.cols(), 0.0);
  for (TokenId id : history) {
    Require(id != model.vocab.blank_id(), ErrorKind::kContract, "blank in prediction history");
    Require(id >= 0 && static_cast<std::size_t>(id) < model.vocab.size(), ErrorKind::kContract,
            "history token out of range");
    auto row = model.embedding.Row(static_cast<std::size_t>(id));
    inputs.emplace_back(row.begin(), row.end());
  }
  if (trace != nullptr) {
    trace->input = inputs;
    trace->layer_outputs.clear();
  }
  Sequence current = std::move(inputs);
  for (const RecurrentLayer &layer : model.prediction) {
    current = RecurrentForward(current, layer);
    if (trace != nullptr) trace->layer_outputs.push_back(current);
  }
  return current;
}

JointActivations JointForward(const Sequence &h_enc, const Sequence &h_pre,
                              const TransducerModel &model) {
  Require(!h_enc.empty(), ErrorKind::kContract, "joint needs at least one frame");
  Require(!h_pre.empty(), ErrorKind::kContract, "joint needs the start prediction state");
  const std::size_t enc_dim = model.EncoderDim(), pre_dim = model.PredictionDim();
  const std::size_t J = model.joint.OutputDim(), K = model.output.OutputDim();
  const Matrix &W = model.joint.weight;
  // Split the joint matmul into per-frame and per-label halves.
  std::vector<Vector> enc_proj(h_enc.size()), pre_proj(h_pre.size());
  for (std::size_t t = 0; t < h_enc.size(); ++t) {
    Require(h_enc[t].size() == enc_dim, ErrorKind::kShape, "encoder state dim");
    Vector a = model.joint.bias;
    for (std::size_t j = 0; j < J; ++j) {
      const double *row = W.Row(j).data();
      double acc = 0.0;
      for (std::size_t c = 0; c < enc_dim; ++c) acc += row[c] * h_enc[t][c];
      a[j] += acc;
    }
    enc_proj[t] = std::move(a);
  }
  for (std::size_t u = 0; u < h_pre.size(); ++u) {
    Require(h_pre[u].size() == pre_dim, ErrorKind::kShape, "prediction state dim");
    Vector b(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const double *row = W.Row(j).data() + enc_dim;
      double acc = 0.0;
      for (std::size_t c = 0; c < pre_dim; ++c) acc += row[c] * h_pre[u][c];
      b[j] = acc;
    }
    pre_proj[u] = std::move(b);
  }
  JointActivations act;
  act.frames = h_enc.size();
  act.positions = h_pre.size();
  act.hidden.resize(act.frames * act.positions * J);
  act.logits.resize(act.frames * act.positions * K);
  for (std::size_t t = 0; t < act.frames; ++t) {
    for (std::size_t u = 0; u < act.positions; ++u) {
      const std::size_t cell = t * act.positions + u;
      std::span<double> z(act.hidden.data() + cell * J, J);
      for (std::size_t j = 0; j < J; ++j) z[j] = std::tanh(enc_proj[t][j] + pre_proj[u][j]);
      std::span<double> logit(act.logits.data() + cell * K, K);
      std::copy(model.output.bias.begin(), model.output.bias.end(), logit.begin());
      AddMatVec(model.output.weight, z, logit);
    }
  }
  return act;
}

PosteriorLattice JointPosteriors(const Sequence &h_enc, const Sequence &h_pre,
                                 const TransducerModel &model) {
  JointActivations act = JointForward(h_enc, h_pre, model);
  return PosteriorLattice::FromLogits(act.frames, act.positions - 1, model.vocab.size(),
                                      act.logits, model.vocab.blank_id());
}

PhonePosteriorgram CiPhoneForward(const Sequence &lower_states, const TransducerModel &model,
                                  BranchTrace *trace) {
  Require(model.phone_branch.has_value(), ErrorKind::kConfig, "model has no phone branch");
  const PhoneBranch &branch = *model.phone_branch;
  if (trace != nullptr) trace->layer_outputs.clear();
  Sequence current = lower_states;
  for (const RecurrentLayer &layer : branch.layers) {
    current = RecurrentForward(current, layer);
    if (trace != nullptr) trace->layer_outputs.push_back(current);
  }
  const std::size_t P = branch.output.OutputDim();
  Matrix post(current.size(), P);
  if (trace != nullptr) trace->logits.clear();
  for (std::size_t t = 0; t < current.size(); ++t) {
    Vector logits = DenseForward(current[t], branch.output);
    Vector p = Softmax(logits);
    std::copy(p.begin(), p.end(), post.Row(t).begin());
    if (trace != nullptr) trace->logits.push_back(std::move(logits));
  }
  return post;
}

double MtlLoss(double rnnt_loss, double ce_loss, double alpha) {
  Require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::kContract, "MTL weight must be in [0, 1]");
  return alpha * ce_loss + (1.0 - alpha) * rnnt_loss;
}

}  // namespace rnntk
