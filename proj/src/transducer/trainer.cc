// src/transducer/trainer.cc
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

#include "rnntk/transducer/trainer.h"

#include <cmath>
#include <numeric>

#include "rnntk/errors.h"
#include "rnntk/numcore/ops.h"
#include "rnntk/numcore/optim.h"

namespace rnntk {

TrainMode ParseTrainMode(const std::string &name) {
  if (name == "rnnt-only") return TrainMode::kRnntOnly;
  if (name == "mtl") return TrainMode::kMtl;
  if (name == "ce-branch-only") return TrainMode::kCeBranchOnly;
  Fail(ErrorKind::kConfig, "unknown training mode '" + name + "'");
}

const char *TrainModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kRnntOnly: return "rnnt-only";
    case TrainMode::kMtl: return "mtl";
    case TrainMode::kCeBranchOnly: return "ce-branch-only";
  }
  return "?";
}

namespace {

struct LossWeights {
  double rnnt;
  double ce;
};

LossWeights WeightsFor(TrainMode mode, double alpha) {
  switch (mode) {
    case TrainMode::kRnntOnly: return {1.0, 0.0};
    case TrainMode::kCeBranchOnly: return {0.0, 1.0};
    case TrainMode::kMtl:
      Require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::kContract, "MTL weight must be in [0, 1]");
      return {1.0 - alpha, alpha};
  }
  return {1.0, 0.0};
}

void CheckPhoneTargets(const Utterance &utt, const TransducerModel &model) {
  Require(model.phone_branch.has_value(), ErrorKind::kConfig,
          "CE training needs a model with a phone branch");
  Require(utt.phone_targets.size() == utt.features.size(), ErrorKind::kData,
          "utterance " + utt.id + " has no frame-level phone targets");
  for (int p : utt.phone_targets) {
    Require(p >= 0 && static_cast<std::size_t>(p) < model.phones.size(), ErrorKind::kData,
            "phone target out of range in " + utt.id);
  }
}

double RnntUtteranceLoss(const TransducerModel &model, const Utterance &utt) {
  EncoderOutput enc = Encode(utt.features, model);
  if (enc.final.empty()) return RnntLoss(PosteriorLattice(), utt.tokens);
  Sequence pre = Predict(utt.tokens, model);
  return RnntLoss(JointPosteriors(enc.final, pre, model), utt.tokens);
}

double CeUtteranceLoss(const TransducerModel &model, const Utterance &utt) {
  EncoderOutput enc = Encode(utt.features, model);
  PhonePosteriorgram post = CiPhoneForward(enc.lower, model);
  double total = 0.0;
  for (std::size_t t = 0; t < post.rows(); ++t) {
    total += CrossEntropyLoss(post.Row(t), static_cast<std::size_t>(utt.phone_targets[t]));
  }
  return total;
}

// Backpropagates the joint network for one utterance. Returns dL/dh_enc.
Sequence JointBackward(const TransducerModel &model, const Sequence &h_enc,
                       const Sequence &h_pre, const JointActivations &act,
                       std::span<const double> d_logits, double scale,
                       TransducerModel *grad, Sequence *d_pre) {
  const std::size_t enc_dim = model.EncoderDim(), pre_dim = model.PredictionDim();
  const std::size_t J = model.joint.OutputDim(), K = model.output.OutputDim();
  const std::size_t T = act.frames, P = act.positions;
  std::vector<Vector> d_a(T, Vector(J, 0.0)), d_b(P, Vector(J, 0.0));
  Vector dz(J), dl(K);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u < P; ++u) {
      const std::size_t cell = t * P + u;
      std::span<const double> z(act.hidden.data() + cell * J, J);
      for (std::size_t k = 0; k < K; ++k) dl[k] = scale * d_logits[cell * K + k];
      std::fill(dz.begin(), dz.end(), 0.0);
      DenseBackward(z, model.output, dl, &grad->output, dz);
      for (std::size_t j = 0; j < J; ++j) {
        const double dpre = dz[j] * (1.0 - z[j] * z[j]);
        d_a[t][j] += dpre;
        d_b[u][j] += dpre;
      }
    }
  }
  Matrix &gW = grad->joint.weight;
  const Matrix &W = model.joint.weight;
  Sequence d_enc(T, Vector(enc_dim, 0.0));
  d_pre->assign(P, Vector(pre_dim, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    AddInPlace(d_a[t], grad->joint.bias);
    for (std::size_t j = 0; j < J; ++j) {
      const double g = d_a[t][j];
      if (g == 0.0) continue;
      double *grow = &gW(j, 0);
      const double *wrow = W.Row(j).data();
      for (std::size_t c = 0; c < enc_dim; ++c) {
        grow[c] += g * h_enc[t][c];
        d_enc[t][c] += g * wrow[c];
      }
    }
  }
  for (std::size_t u = 0; u < P; ++u) {
    for (std::size_t j = 0; j < J; ++j) {
      const double g = d_b[u][j];
      if (g == 0.0) continue;
      double *grow = &gW(j, enc_dim);
      const double *wrow = W.Row(j).data() + enc_dim;
      for (std::size_t c = 0; c < pre_dim; ++c) {
        grow[c] += g * h_pre[u][c];
        (*d_pre)[u][c] += g * wrow[c];
      }
    }
  }
  return d_enc;
}

RecurrentLayer &MutableEncoderLayer(TransducerModel *m, std::size_t i) {
  return i < m->encoder_lower.size() ? m->encoder_lower[i]
                                     : m->encoder_upper[i - m->encoder_lower.size()];
}

// Gradient of w.rnnt * L_rnnt + w.ce * L_ce for one utterance, scaled by `scale`.
BatchLoss UtteranceGradient(const TransducerModel &model, const Utterance &utt,
                            LossWeights w, double scale, TransducerModel *grad) {
  BatchLoss loss;
  const std::size_t depth = model.EncoderDepth();
  const std::size_t tap = model.encoder_lower.size() - 1;
  EncoderTrace enc_trace;
  EncoderOutput enc = Encode(utt.features, model, &enc_trace);
  const std::size_t T = enc.final.size();
  std::vector<Sequence> d_layer(depth);  // dL/d(output of encoder layer i)
  bool encoder_touched = false;

  if (w.rnnt > 0.0 && T > 0) {
    PredictionTrace pre_trace;
    Sequence pre = Predict(utt.tokens, model, &pre_trace);
    JointActivations act = JointForward(enc.final, pre, model);
    PosteriorLattice lat = PosteriorLattice::FromLogits(
        T, utt.tokens.size(), model.vocab.size(), act.logits, model.vocab.blank_id());
    double rnnt = 0.0;
    Vector d_logits = RnntGradient(lat, utt.tokens, &rnnt);
    loss.rnnt = rnnt;
    Sequence d_pre;
    d_layer[depth - 1] =
        JointBackward(model, enc.final, pre, act, d_logits, scale * w.rnnt, grad, &d_pre);
    encoder_touched = true;
    // Prediction network.
    Sequence d_out = std::move(d_pre);
    for (std::size_t i = model.prediction.size(); i-- > 0;) {
      const Sequence &inputs = i == 0 ? pre_trace.input : pre_trace.layer_outputs[i - 1];
      Sequence d_in;
      RecurrentBackward(inputs, pre_trace.layer_outputs[i], model.prediction[i], d_out,
                        &grad->prediction[i], &d_in);
      d_out = std::move(d_in);
    }
    for (std::size_t u = 0; u < utt.tokens.size(); ++u) {
      AddInPlace(d_out[u + 1], grad->embedding.Row(static_cast<std::size_t>(utt.tokens[u])));
    }
  } else if (w.rnnt > 0.0) {
    loss.rnnt = RnntLoss(PosteriorLattice(), utt.tokens);
  }

  if (w.ce > 0.0) {
    CheckPhoneTargets(utt, model);
    const PhoneBranch &branch = *model.phone_branch;
    BranchTrace br;
    PhonePosteriorgram post = CiPhoneForward(enc.lower, model, &br);
    const std::size_t P = branch.output.OutputDim();
    const Sequence &top = branch.layers.empty() ? enc.lower : br.layer_outputs.back();
    Sequence d_out(T, Vector(top.empty() ? 0 : top[0].size(), 0.0));
    Vector dl(P);
    double ce = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const auto target = static_cast<std::size_t>(utt.phone_targets[t]);
      ce += CrossEntropyLoss(post.Row(t), target);
      for (std::size_t p = 0; p < P; ++p) {
        dl[p] = scale * w.ce * (post(t, p) - (p == target ? 1.0 : 0.0));
      }
      DenseBackward(top[t], branch.output, dl, &grad->phone_branch->output, d_out[t]);
    }
    loss.ce = ce;
    for (std::size_t i = branch.layers.size(); i-- > 0;) {
      const Sequence &inputs = i == 0 ? enc.lower : br.layer_outputs[i - 1];
      Sequence d_in;
      RecurrentBackward(inputs, br.layer_outputs[i], branch.layers[i], d_out,
                        &grad->phone_branch->layers[i], &d_in);
      d_out = std::move(d_in);
    }
    // The CE gradient enters the encoder at the tap layer. In ce-branch-only
    // mode those blocks are frozen, so this only matters for MTL updates.
    if (T > 0) {
      Sequence &slot = d_layer[tap];
      if (slot.empty()) slot.assign(T, Vector(model.encoder_lower[tap].HiddenDim(), 0.0));
      for (std::size_t t = 0; t < T; ++t) AddInPlace(d_out[t], slot[t]);
      encoder_touched = true;
    }
  }

  if (encoder_touched) {
    Sequence d_out;
    for (std::size_t i = depth; i-- > 0;) {
      if (!d_layer[i].empty()) {
        if (d_out.empty()) {
          d_out = std::move(d_layer[i]);
        } else {
          for (std::size_t t = 0; t < T; ++t) AddInPlace(d_layer[i][t], d_out[t]);
        }
      }
      if (d_out.empty()) continue;
      const Sequence &inputs = i == 0 ? enc_trace.input : enc_trace.layer_outputs[i - 1];
      Sequence d_in;
      RecurrentBackward(inputs, enc_trace.layer_outputs[i], model.EncoderLayer(i), d_out,
                        &MutableEncoderLayer(grad, i), i == 0 ? nullptr : &d_in);
      d_out = std::move(d_in);
    }
  }
  loss.objective = w.rnnt * loss.rnnt + w.ce * loss.ce;
  return loss;
}

std::set<std::string> EffectiveFrozen(const TransducerModel &model, const TrainOptions &opt) {
  std::set<std::string> frozen = opt.frozen_groups;
  if (opt.mode == TrainMode::kCeBranchOnly) {
    for (const auto &block : model.Params()) {
      if (!IsBranchGroup(block.group)) frozen.insert(block.group);
    }
  }
  return frozen;
}

}  // namespace

BatchLoss EvaluateBatch(const TransducerModel &model, std::span<const Utterance> batch,
                        TrainMode mode, double alpha) {
  Require(!batch.empty(), ErrorKind::kContract, "empty batch");
  const LossWeights w = WeightsFor(mode, alpha);
  BatchLoss total;
  for (const Utterance &utt : batch) {
    if (w.rnnt > 0.0) total.rnnt += RnntUtteranceLoss(model, utt);
    if (w.ce > 0.0) {
      CheckPhoneTargets(utt, model);
      total.ce += CeUtteranceLoss(model, utt);
    }
  }
  const double n = static_cast<double>(batch.size());
  total.rnnt /= n;
  total.ce /= n;
  total.objective = w.rnnt * total.rnnt + w.ce * total.ce;
  return total;
}

BatchLoss ComputeGradients(const TransducerModel &model, std::span<const Utterance> batch,
                           TrainMode mode, double alpha, TransducerModel *grad) {
  Require(!batch.empty(), ErrorKind::kContract, "empty batch");
  const LossWeights w = WeightsFor(mode, alpha);
  const double scale = 1.0 / static_cast<double>(batch.size());
  BatchLoss total;
  for (const Utterance &utt : batch) {
    BatchLoss l = UtteranceGradient(model, utt, w, scale, grad);
    total.rnnt += l.rnnt * scale;
    total.ce += l.ce * scale;
  }
  total.objective = w.rnnt * total.rnnt + w.ce * total.ce;
  return total;
}

BatchLoss TrainStep(TransducerModel *model, std::span<const Utterance> batch,
                    const TrainOptions &options) {
  TransducerModel grad = model->ZerosLike();
  BatchLoss loss = ComputeGradients(*model, batch, options.mode, options.alpha, &grad);
  Require(std::isfinite(loss.objective), ErrorKind::kNumeric,
          "non-finite training objective (utterance shorter than its label sequence?)");
  const std::set<std::string> frozen = EffectiveFrozen(*model, options);
  std::vector<ParamBlock> params = model->Params();
  std::vector<ParamBlock> grads = grad.Params();
  double sq = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (frozen.contains(grads[i].group)) continue;
    for (double g : grads[i].values) sq += g * g;
  }
  double lr = options.lr;
  if (options.clip_norm > 0.0 && std::sqrt(sq) > options.clip_norm) {
    lr *= options.clip_norm / std::sqrt(sq);
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    SgdStep(params[i].values, grads[i].values, lr, frozen.contains(params[i].group));
  }
  return loss;
}

std::vector<BatchLoss> Fit(TransducerModel *model, std::span<const Utterance> data,
                           const FitOptions &options,
                           const std::function<void(std::size_t, const BatchLoss &)> &on_epoch) {
  Require(!data.empty(), ErrorKind::kContract, "empty training set");
  Require(options.batch_size > 0, ErrorKind::kConfig, "batch size must be positive");
  std::vector<BatchLoss> history;
  std::vector<std::size_t> order(data.size());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(DeriveSeed(options.seed, "fit-shuffle", epoch));
    Shuffle(&order, &rng);
    BatchLoss epoch_loss;
    std::size_t batches = 0;
    std::vector<Utterance> batch;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + options.batch_size); ++i) {
        batch.push_back(data[order[i]]);
      }
      BatchLoss l = TrainStep(model, batch, options.step);
      epoch_loss.rnnt += l.rnnt;
      epoch_loss.ce += l.ce;
      epoch_loss.objective += l.objective;
      ++batches;
    }
    epoch_loss.rnnt /= batches;
    epoch_loss.ce /= batches;
    epoch_loss.objective /= batches;
    history.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }
  return history;
}

TransducerModel Adapt(const TransducerModel &model, std::span<const Utterance> mixed,
                      const AdaptOptions &options) {
  Require(options.freeze_lower < model.EncoderDepth(), ErrorKind::kConfig,
          "cannot freeze " + std::to_string(options.freeze_lower) + " of " +
              std::to_string(model.EncoderDepth()) + " encoder layers");
  TransducerModel adapted = model;
  if (options.steps == 0) return adapted;
  bool spliced = false, real = false;
  for (const Utterance &u : mixed) {
    spliced |= u.origin == "spliced";
    real |= u.origin == "real";
  }
  Require(spliced && real, ErrorKind::kData,
          "adaptation set must mix spliced and real utterances");
  TrainOptions step;
  step.mode = TrainMode::kRnntOnly;
  step.lr = options.lr;
  step.clip_norm = options.clip_norm;
  for (std::size_t i = 0; i < options.freeze_lower; ++i) step.frozen_groups.insert(EncoderGroup(i));
  std::vector<std::size_t> order;
  std::size_t cursor = 0, pass = 0;
  std::vector<Utterance> batch;
  for (std::size_t s = 0; s < options.steps; ++s) {
    batch.clear();
    while (batch.size() < std::min(options.batch_size, mixed.size())) {
      if (cursor == order.size()) {
        order.resize(mixed.size());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(DeriveSeed(options.seed, "adapt-shuffle", pass++));
        Shuffle(&order, &rng);
        cursor = 0;
      }
      batch.push_back(mixed[order[cursor++]]);
    }
    TrainStep(&adapted, batch, step);
  }
  return adapted;
}

}  // namespace rnntk
