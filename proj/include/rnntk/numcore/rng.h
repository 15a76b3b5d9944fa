// include/rnntk/numcore/rng.h
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

#ifndef RNNTK_NUMCORE_RNG_H_
#define RNNTK_NUMCORE_RNG_H_

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace rnntk {

// SplitMix64 generator. All sampling helpers are implemented here rather than
// through <random> distributions so streams are identical across standard
// libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return Next(); }

  std::uint64_t Next();
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Unbiased integer in [0, n); n must be positive.
  std::size_t UniformIndex(std::size_t n);
  double Normal();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Stable sub-seed for (master, purpose, index). Used so that every consumer of
// randomness gets its own stream that does not shift when others change.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view purpose,
                         std::uint64_t index = 0);

template <typename T>
void Shuffle(T *items, Rng *rng) {
  for (std::size_t i = items->size(); i > 1; --i) {
    std::size_t j = rng->UniformIndex(i);
    using std::swap;
    swap((*items)[i - 1], (*items)[j]);
  }
}

}  // namespace rnntk

#endif  // RNNTK_NUMCORE_RNG_H_
