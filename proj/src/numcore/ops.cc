// src/numcore/ops.cc
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

#include "rnntk/numcore/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rnntk/errors.h"

namespace rnntk {

void RequireFinite(std::span<const double> values, const char *what) {
  for (double v : values) {
    if (!std::isfinite(v)) Fail(ErrorKind::kNumeric, std::string("non-finite ") + what);
  }
}

Vector Softmax(std::span<const double> logits) {
  RequireFinite(logits, "softmax input");
  Vector out(logits.size());
  if (logits.empty()) return out;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double &v : out) v /= sum;
  return out;
}

Vector LogSoftmax(std::span<const double> logits) {
  RequireFinite(logits, "log-softmax input");
  const double lse = LogSumExp(logits);
  Vector out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

double LogSumExp(std::span<const double> values) {
  Require(!values.empty(), ErrorKind::kContract, "log_sum_exp of empty input");
  if (values.size() == 1) return values[0];
  const double mx = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(mx)) return mx;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - mx);
  return mx + std::log(sum);
}

double LogAdd(double a, double b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(-std::abs(a - b)));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void TanhInPlace(std::span<double> x) {
  for (double &v : x) v = std::tanh(v);
}

double BceLoss(double p, int label) {
  Require(label == 0 || label == 1, ErrorKind::kContract,
          "binary label must be 0 or 1, got " + std::to_string(label));
  Require(std::isfinite(p), ErrorKind::kNumeric, "non-finite probability");
  p = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
  return label == 1 ? -std::log(p) : -std::log1p(-p);
}

double CrossEntropyLoss(std::span<const double> probs, std::size_t target) {
  Require(target < probs.size(), ErrorKind::kContract,
          "target " + std::to_string(target) + " out of range for " +
              std::to_string(probs.size()) + " classes");
  return -std::log(std::clamp(probs[target], kProbFloor, 1.0));
}

double NegativeEntropy(std::span<const double> probs) {
  double acc = 0.0;
  for (double p : probs) {
    if (p > 0.0) acc += p * std::log(p);
  }
  return acc;
}

}  // namespace rnntk
