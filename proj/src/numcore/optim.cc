// src/numcore/optim.cc
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

#include "rnntk/numcore/optim.h"

#include <algorithm>
#include <cmath>

#include "rnntk/errors.h"

namespace rnntk {

void SgdStep(std::span<double> params, std::span<const double> grads, double lr,
             bool frozen) {
  Require(params.size() == grads.size(), ErrorKind::kShape,
          "sgd params/grads size mismatch");
  Require(lr > 0.0, ErrorKind::kContract, "learning rate must be positive");
  if (frozen) return;
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

Vector FiniteDiffGradient(const ScalarFunction &f, std::span<const double> params,
                          double eps) {
  Require(eps > 0.0, ErrorKind::kContract, "finite-difference step must be positive");
  Vector theta(params.begin(), params.end());
  Vector grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double orig = theta[i];
    theta[i] = orig + eps;
    const double plus = f(theta);
    theta[i] = orig - eps;
    const double minus = f(theta);
    theta[i] = orig;
    Require(std::isfinite(plus) && std::isfinite(minus), ErrorKind::kNumeric,
            "function value not finite during finite differencing");
    grad[i] = (plus - minus) / (2.0 * eps);
  }
  return grad;
}

double MaxRelativeError(std::span<const double> a, std::span<const double> b,
                        double floor) {
  Require(a.size() == b.size(), ErrorKind::kShape, "relative error size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace rnntk
