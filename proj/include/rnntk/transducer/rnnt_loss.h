// include/rnntk/transducer/rnnt_loss.h
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

#ifndef RNNTK_TRANSDUCER_RNNT_LOSS_H_
#define RNNTK_TRANSDUCER_RNNT_LOSS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rnntk/numcore/matrix.h"
#include "rnntk/transducer/vocabulary.h"

namespace rnntk {

// P(k | t, u) over frames t < T, label positions u <= U and tokens k < K.
// Stored as log-probabilities; Prob() exponentiates.
class PosteriorLattice {
 public:
  PosteriorLattice() = default;
  // `logits` is laid out [t][u][k]; each (t, u) slice is log-softmaxed.
  static PosteriorLattice FromLogits(std::size_t frames, std::size_t labels,
                                     std::size_t tokens, std::span<const double> logits,
                                     TokenId blank = 0);
  // Each (t, u) slice must already sum to one.
  static PosteriorLattice FromProbs(std::size_t frames, std::size_t labels,
                                    std::size_t tokens, std::span<const double> probs,
                                    TokenId blank = 0);

  std::size_t frames() const { return frames_; }
  std::size_t labels() const { return labels_; }
  std::size_t tokens() const { return tokens_; }
  TokenId blank() const { return blank_; }

  double LogProb(std::size_t t, std::size_t u, TokenId k) const {
    return log_probs_[Offset(t, u) + static_cast<std::size_t>(k)];
  }
  double Prob(std::size_t t, std::size_t u, TokenId k) const;
  std::span<const double> LogSlice(std::size_t t, std::size_t u) const {
    return {log_probs_.data() + Offset(t, u), tokens_};
  }
  std::size_t Offset(std::size_t t, std::size_t u) const {
    return (t * (labels_ + 1) + u) * tokens_;
  }

 private:
  std::size_t frames_ = 0;
  std::size_t labels_ = 0;
  std::size_t tokens_ = 0;
  TokenId blank_ = 0;
  std::vector<double> log_probs_;
};

// -ln P(y | x) by the log-domain forward recursion. Returns +inf when no
// alignment exists (T = 0 with U > 0).
double RnntLoss(const PosteriorLattice &lattice, std::span<const TokenId> target);

struct BruteForceLoss {
  double loss;
  std::uint64_t paths_enumerated;  // all C(T+U, U) blank/label interleavings
  std::uint64_t valid_paths;       // those that end with a blank on the last frame
};

// Oracle: explicit path enumeration. Requires T + U <= 12.
BruteForceLoss RnntLossBruteForce(const PosteriorLattice &lattice,
                                  std::span<const TokenId> target);

// dL/d logits laid out like the lattice ([t][u][k]), from alpha/beta
// occupancies. Empty when the loss is infinite.
Vector RnntGradient(const PosteriorLattice &lattice, std::span<const TokenId> target,
                    double *loss = nullptr);

}  // namespace rnntk

#endif  // RNNTK_TRANSDUCER_RNNT_LOSS_H_
