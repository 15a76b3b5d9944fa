// src/transducer/rnnt_loss.cc
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

#include "rnntk/transducer/rnnt_loss.h"

#include <cmath>
#include <limits>

#include "rnntk/errors.h"
#include "rnntk/numcore/ops.h"

namespace rnntk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckTarget(const PosteriorLattice &lattice, std::span<const TokenId> target) {
  // An empty lattice carries no U; any target length is then answerable.
  Require(lattice.frames() == 0 || target.size() == lattice.labels(), ErrorKind::kContract,
          "target length " + std::to_string(target.size()) + " != lattice U " +
              std::to_string(lattice.labels()));
  for (TokenId k : target) {
    Require(k != lattice.blank(), ErrorKind::kContract, "blank inside target");
    Require(k >= 0 && (lattice.frames() == 0 || static_cast<std::size_t>(k) < lattice.tokens()),
            ErrorKind::kContract,
            "target token out of range");
  }
}

// alpha[t][u] over a (T) x (U+1) grid, row-major.
std::vector<double> Forward(const PosteriorLattice &lat, std::span<const TokenId> y) {
  const std::size_t T = lat.frames(), U = lat.labels();
  std::vector<double> alpha(T * (U + 1), kNegInf);
  auto at = [&](std::size_t t, std::size_t u) -> double & { return alpha[t * (U + 1) + u]; };
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      if (t == 0 && u == 0) {
        at(0, 0) = 0.0;
        continue;
      }
      double v = kNegInf;
      if (t > 0) v = at(t - 1, u) + lat.LogProb(t - 1, u, lat.blank());
      if (u > 0) v = LogAdd(v, at(t, u - 1) + lat.LogProb(t, u - 1, y[u - 1]));
      at(t, u) = v;
    }
  }
  return alpha;
}

std::vector<double> Backward(const PosteriorLattice &lat, std::span<const TokenId> y) {
  const std::size_t T = lat.frames(), U = lat.labels();
  std::vector<double> beta(T * (U + 1), kNegInf);
  auto at = [&](std::size_t t, std::size_t u) -> double & { return beta[t * (U + 1) + u]; };
  for (std::size_t t = T; t-- > 0;) {
    for (std::size_t u = U + 1; u-- > 0;) {
      if (t == T - 1 && u == U) {
        at(t, u) = lat.LogProb(t, u, lat.blank());
        continue;
      }
      double v = kNegInf;
      if (t + 1 < T) v = at(t + 1, u) + lat.LogProb(t, u, lat.blank());
      if (u < U) v = LogAdd(v, at(t, u + 1) + lat.LogProb(t, u, y[u]));
      at(t, u) = v;
    }
  }
  return beta;
}

}  // namespace

PosteriorLattice PosteriorLattice::FromLogits(std::size_t frames, std::size_t labels,
                                              std::size_t tokens,
                                              std::span<const double> logits, TokenId blank) {
  Require(logits.size() == frames * (labels + 1) * tokens, ErrorKind::kShape,
          "lattice logits size");
  Require(blank >= 0 && static_cast<std::size_t>(blank) < tokens, ErrorKind::kContract,
          "blank id out of range");
  PosteriorLattice lat;
  lat.frames_ = frames;
  lat.labels_ = labels;
  lat.tokens_ = tokens;
  lat.blank_ = blank;
  lat.log_probs_.resize(logits.size());
  for (std::size_t off = 0; off < logits.size(); off += tokens) {
    Vector ls = LogSoftmax(logits.subspan(off, tokens));
    std::copy(ls.begin(), ls.end(), lat.log_probs_.begin() + off);
  }
  return lat;
}

PosteriorLattice PosteriorLattice::FromProbs(std::size_t frames, std::size_t labels,
                                             std::size_t tokens,
                                             std::span<const double> probs, TokenId blank) {
  Require(probs.size() == frames * (labels + 1) * tokens, ErrorKind::kShape,
          "lattice probs size");
  PosteriorLattice lat;
  lat.frames_ = frames;
  lat.labels_ = labels;
  lat.tokens_ = tokens;
  lat.blank_ = blank;
  lat.log_probs_.resize(probs.size());
  for (std::size_t off = 0; off < probs.size(); off += tokens) {
    double sum = 0.0;
    for (std::size_t k = 0; k < tokens; ++k) {
      Require(probs[off + k] >= 0.0, ErrorKind::kNumeric, "negative probability");
      sum += probs[off + k];
      lat.log_probs_[off + k] = std::log(probs[off + k]);
    }
    Require(std::abs(sum - 1.0) < 1e-9, ErrorKind::kNumeric, "lattice slice not normalized");
  }
  return lat;
}

double PosteriorLattice::Prob(std::size_t t, std::size_t u, TokenId k) const {
  return std::exp(LogProb(t, u, k));
}

double RnntLoss(const PosteriorLattice &lattice, std::span<const TokenId> target) {
  CheckTarget(lattice, target);
  const std::size_t T = lattice.frames(), U = lattice.labels();
  if (T == 0) return target.empty() ? 0.0 : kInf;
  std::vector<double> alpha = Forward(lattice, target);
  const double log_z = alpha[(T - 1) * (U + 1) + U] + lattice.LogProb(T - 1, U, lattice.blank());
  return -log_z;
}

BruteForceLoss RnntLossBruteForce(const PosteriorLattice &lattice,
                                  std::span<const TokenId> target) {
  CheckTarget(lattice, target);
  const std::size_t T = lattice.frames(), U = lattice.labels();
  Require(T + U <= 12, ErrorKind::kContract, "instance too large for enumeration");
  BruteForceLoss out{0.0, 0, 0};
  if (T == 0) {
    out.loss = target.empty() ? 0.0 : kInf;
    return out;
  }
  std::vector<double> path_scores;
  std::vector<bool> is_label(T + U, false);
  // Recursively choose which of the T+U action slots carry labels.
  auto walk = [&](auto &&self, std::size_t slot, std::size_t placed) -> void {
    if (placed == U) {
      ++out.paths_enumerated;
      std::size_t t = 0, u = 0;
      double score = 0.0;
      for (std::size_t i = 0; i < T + U; ++i) {
        if (t >= T) return;  // action after the final frame advance: leaves the lattice
        if (is_label[i]) {
          score += lattice.LogProb(t, u, target[u]);
          ++u;
        } else {
          score += lattice.LogProb(t, u, lattice.blank());
          ++t;
        }
      }
      ++out.valid_paths;
      path_scores.push_back(score);
      return;
    }
    if (slot == T + U) return;
    if (T + U - slot < U - placed) return;
    is_label[slot] = true;
    self(self, slot + 1, placed + 1);
    is_label[slot] = false;
    self(self, slot + 1, placed);
  };
  walk(walk, 0, 0);
  if (path_scores.empty()) {
    out.loss = (T == 0 && target.empty()) ? 0.0 : kInf;
  } else {
    out.loss = -LogSumExp(path_scores);
  }
  return out;
}

Vector RnntGradient(const PosteriorLattice &lattice, std::span<const TokenId> target,
                    double *loss) {
  CheckTarget(lattice, target);
  const std::size_t T = lattice.frames(), U = lattice.labels(), K = lattice.tokens();
  if (T == 0) {
    if (loss != nullptr) *loss = target.empty() ? 0.0 : kInf;
    return {};
  }
  std::vector<double> alpha = Forward(lattice, target);
  std::vector<double> beta = Backward(lattice, target);
  const double log_z = beta[0];
  if (loss != nullptr) *loss = -log_z;
  Vector grad(T * (U + 1) * K, 0.0);
  const TokenId blank = lattice.blank();
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u <= U; ++u) {
      const double a = alpha[t * (U + 1) + u];
      const double occ = std::exp(a + beta[t * (U + 1) + u] - log_z);
      double *g = grad.data() + lattice.Offset(t, u);
      std::span<const double> lp = lattice.LogSlice(t, u);
      for (std::size_t k = 0; k < K; ++k) g[k] = std::exp(lp[k]) * occ;
      double blank_next = kNegInf;
      if (t + 1 < T) {
        blank_next = beta[(t + 1) * (U + 1) + u];
      } else if (u == U) {
        blank_next = 0.0;
      }
      g[blank] -= std::exp(a + lp[blank] + blank_next - log_z);
      if (u < U) {
        const TokenId y = target[u];
        g[y] -= std::exp(a + lp[y] + beta[t * (U + 1) + u + 1] - log_z);
      }
    }
  }
  return grad;
}

}  // namespace rnntk
