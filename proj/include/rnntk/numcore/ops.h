// include/rnntk/numcore/ops.h
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

#ifndef RNNTK_NUMCORE_OPS_H_
#define RNNTK_NUMCORE_OPS_H_

#include <span>

#include "rnntk/numcore/matrix.h"

namespace rnntk {

// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before logs.
inline constexpr double kProbFloor = 1e-7;

// Max-subtracted softmax. Throws kNumeric on non-finite input.
Vector Softmax(std::span<const double> logits);
Vector LogSoftmax(std::span<const double> logits);

// Throws kContract on empty input.
double LogSumExp(std::span<const double> values);
// Two-argument form used inside dynamic programs; handles -inf operands.
double LogAdd(double a, double b);

double Sigmoid(double x);
void TanhInPlace(std::span<double> x);

// -[c ln p + (1 - c) ln(1 - p)] with p clamped. label must be 0 or 1.
double BceLoss(double p, int label);
// -ln probs[target] with the probability clamped.
double CrossEntropyLoss(std::span<const double> probs, std::size_t target);

// Sum of p ln p, i.e. the negative entropy of a normalized distribution.
double NegativeEntropy(std::span<const double> probs);

void RequireFinite(std::span<const double> values, const char *what);

}  // namespace rnntk

#endif  // RNNTK_NUMCORE_OPS_H_
