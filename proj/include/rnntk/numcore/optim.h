// include/rnntk/numcore/optim.h
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

#ifndef RNNTK_NUMCORE_OPTIM_H_
#define RNNTK_NUMCORE_OPTIM_H_

#include <functional>
#include <span>

#include "rnntk/numcore/matrix.h"

namespace rnntk {

// theta <- theta - lr * g. A frozen block is left untouched (bit-identical).
void SgdStep(std::span<double> params, std::span<const double> grads, double lr,
             bool frozen = false);

using ScalarFunction = std::function<double(std::span<const double>)>;

// Central differences (f(theta + eps e_i) - f(theta - eps e_i)) / 2 eps.
Vector FiniteDiffGradient(const ScalarFunction &f, std::span<const double> params,
                          double eps = 1e-5);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor). The floor keeps near-zero
// coordinates from dominating.
double MaxRelativeError(std::span<const double> a, std::span<const double> b,
                        double floor = 1e-6);

}  // namespace rnntk

#endif  // RNNTK_NUMCORE_OPTIM_H_
