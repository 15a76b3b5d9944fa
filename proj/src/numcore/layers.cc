// src/numcore/layers.cc
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

#include "rnntk/numcore/layers.h"

#include <cmath>
#include <string>

#include "rnntk/errors.h"
#include "rnntk/numcore/ops.h"

namespace rnntk {

DenseLayer DenseLayer::Zeros(std::size_t in_dim, std::size_t out_dim) {
  return DenseLayer{Matrix(out_dim, in_dim), Vector(out_dim, 0.0)};
}

void DenseLayer::Validate() const {
  Require(bias.size() == weight.rows(), ErrorKind::kShape,
          "dense bias dim " + std::to_string(bias.size()) + " vs weight " +
              ShapeString(weight));
}

RecurrentLayer RecurrentLayer::Zeros(std::size_t in_dim, std::size_t hidden_dim) {
  return RecurrentLayer{Matrix(hidden_dim, in_dim), Matrix(hidden_dim, hidden_dim),
                        Vector(hidden_dim, 0.0)};
}

void RecurrentLayer::Validate() const {
  Require(recurrent_weight.rows() == HiddenDim() &&
              recurrent_weight.cols() == HiddenDim(),
          ErrorKind::kShape,
          "recurrent weight must be square hidden x hidden, got " +
              ShapeString(recurrent_weight));
  Require(bias.size() == HiddenDim(), ErrorKind::kShape, "recurrent bias dim");
}

Vector DenseForward(std::span<const double> x, const DenseLayer &layer) {
  Require(x.size() == layer.InputDim(), ErrorKind::kShape,
          "dense input dim " + std::to_string(x.size()) + " vs weight " +
              ShapeString(layer.weight));
  Vector y = layer.bias;
  AddMatVec(layer.weight, x, y);
  return y;
}

void DenseBackward(std::span<const double> x, const DenseLayer &layer,
                   std::span<const double> dy, DenseLayer *grad,
                   std::span<double> dx) {
  AddOuter(dy, x, 1.0, &grad->weight);
  AddInPlace(dy, grad->bias);
  if (!dx.empty()) AddMatTVec(layer.weight, dy, dx);
}

Vector RecurrentStep(std::span<const double> x, std::span<const double> h_prev,
                     const RecurrentLayer &layer) {
  Require(x.size() == layer.InputDim(), ErrorKind::kShape,
          "recurrent input dim " + std::to_string(x.size()) + " vs weight " +
              ShapeString(layer.input_weight));
  Vector h = layer.bias;
  AddMatVec(layer.input_weight, x, h);
  if (!h_prev.empty()) AddMatVec(layer.recurrent_weight, h_prev, h);
  TanhInPlace(h);
  return h;
}

Sequence RecurrentForward(const Sequence &seq, const RecurrentLayer &layer,
                          std::span<const double> h0) {
  Require(h0.empty() || h0.size() == layer.HiddenDim(), ErrorKind::kShape,
          "initial state dim");
  Sequence out;
  out.reserve(seq.size());
  std::span<const double> prev = h0;
  for (const Vector &x : seq) {
    out.push_back(RecurrentStep(x, prev, layer));
    prev = out.back();
  }
  return out;
}

void RecurrentBackward(const Sequence &inputs, const Sequence &outputs,
                       const RecurrentLayer &layer, const Sequence &d_outputs,
                       RecurrentLayer *grad, Sequence *d_inputs) {
  const std::size_t steps = inputs.size();
  Require(outputs.size() == steps && d_outputs.size() == steps, ErrorKind::kShape,
          "recurrent backward sequence lengths differ");
  const std::size_t hidden = layer.HiddenDim();
  if (d_inputs != nullptr) d_inputs->assign(steps, Vector(layer.InputDim(), 0.0));
  Vector carry(hidden, 0.0);  // dL/dh_t flowing back from step t+1
  Vector dpre(hidden);
  for (std::size_t t = steps; t-- > 0;) {
    const Vector &h = outputs[t];
    for (std::size_t i = 0; i < hidden; ++i) {
      dpre[i] = (d_outputs[t][i] + carry[i]) * (1.0 - h[i] * h[i]);
    }
    AddOuter(dpre, inputs[t], 1.0, &grad->input_weight);
    AddInPlace(dpre, grad->bias);
    if (d_inputs != nullptr) AddMatTVec(layer.input_weight, dpre, (*d_inputs)[t]);
    std::fill(carry.begin(), carry.end(), 0.0);
    if (t > 0) {
      AddOuter(dpre, outputs[t - 1], 1.0, &grad->recurrent_weight);
      AddMatTVec(layer.recurrent_weight, dpre, carry);
    }
  }
}

namespace {

void FillUniform(Matrix *m, double scale, Rng *rng) {
  for (double &v : m->values()) v = rng->Uniform(-scale, scale);
}

}  // namespace

void InitUniform(DenseLayer *layer, Rng *rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(layer->InputDim()));
  FillUniform(&layer->weight, scale, rng);
  std::fill(layer->bias.begin(), layer->bias.end(), 0.0);
}

void InitUniform(RecurrentLayer *layer, Rng *rng) {
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(layer->InputDim()));
  const double rec_scale = 1.0 / std::sqrt(static_cast<double>(layer->HiddenDim()));
  FillUniform(&layer->input_weight, in_scale, rng);
  FillUniform(&layer->recurrent_weight, rec_scale, rng);
  std::fill(layer->bias.begin(), layer->bias.end(), 0.0);
}

}  // namespace rnntk
