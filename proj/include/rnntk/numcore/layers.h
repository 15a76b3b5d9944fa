// include/rnntk/numcore/layers.h
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

#ifndef RNNTK_NUMCORE_LAYERS_H_
#define RNNTK_NUMCORE_LAYERS_H_

#include <span>
#include <vector>

#include "rnntk/numcore/matrix.h"
#include "rnntk/numcore/rng.h"

namespace rnntk {

// y = W x + b, W is out x in.
struct DenseLayer {
  Matrix weight;
  Vector bias;

  static DenseLayer Zeros(std::size_t in_dim, std::size_t out_dim);
  std::size_t InputDim() const { return weight.cols(); }
  std::size_t OutputDim() const { return weight.rows(); }
  void Validate() const;
  bool operator==(const DenseLayer &) const = default;
};

// Elman cell: h_t = tanh(W x_t + U h_{t-1} + b).
struct RecurrentLayer {
  Matrix input_weight;      // hidden x in
  Matrix recurrent_weight;  // hidden x hidden
  Vector bias;

  static RecurrentLayer Zeros(std::size_t in_dim, std::size_t hidden_dim);
  std::size_t InputDim() const { return input_weight.cols(); }
  std::size_t HiddenDim() const { return input_weight.rows(); }
  void Validate() const;
  bool operator==(const RecurrentLayer &) const = default;
};

using Sequence = std::vector<Vector>;

Vector DenseForward(std::span<const double> x, const DenseLayer &layer);

// Accumulates parameter gradients into *grad and, if dx is non-null, the input
// gradient into *dx (which must already have the input dimension).
void DenseBackward(std::span<const double> x, const DenseLayer &layer,
                   std::span<const double> dy, DenseLayer *grad,
                   std::span<double> dx = {});

// An empty h0 means the zero state.
Sequence RecurrentForward(const Sequence &seq, const RecurrentLayer &layer,
                          std::span<const double> h0 = {});

// One step of the cell; used by decoders that grow the sequence incrementally.
Vector RecurrentStep(std::span<const double> x, std::span<const double> h_prev,
                     const RecurrentLayer &layer);

// Backpropagation through time for a sequence computed from the zero state.
// d_outputs holds dL/dh_t; parameter gradients are accumulated into *grad and
// input gradients written to *d_inputs when non-null.
void RecurrentBackward(const Sequence &inputs, const Sequence &outputs,
                       const RecurrentLayer &layer, const Sequence &d_outputs,
                       RecurrentLayer *grad, Sequence *d_inputs);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation, zero biases.
void InitUniform(DenseLayer *layer, Rng *rng);
void InitUniform(RecurrentLayer *layer, Rng *rng);

}  // namespace rnntk

#endif  // RNNTK_NUMCORE_LAYERS_H_
