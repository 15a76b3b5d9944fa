// tests/unit/numcore_test.cc
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

#include <cmath>
#include <cstring>
#include <functional>
#include <limits>

#include "doctest.h"
#include "rnntk/errors.h"
#include "rnntk/numcore/layers.h"
#include "rnntk/numcore/matrix_io.h"
#include "rnntk/numcore/ops.h"
#include "rnntk/numcore/optim.h"
#include "rnntk/numcore/rng.h"

using namespace rnntk;

namespace {

ErrorKind KindOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected rnntk::Error");
  return ErrorKind::kData;
}

Vector RandomVector(std::size_t n, double scale, Rng *rng) {
  Vector v(n);
  for (double &x : v) x = rng->Uniform(-scale, scale);
  return v;
}

}  // namespace

TEST_CASE("dense_forward examples") {
  DenseLayer id{Matrix::Identity(2), {0, 0}};
  CHECK(DenseForward(Vector{3, 4}, id) == Vector{3, 4});

  DenseLayer l{Matrix(2, 2, {1, 2, 0, 1}), {1, 0}};
  CHECK(DenseForward(Vector{1, 1}, l) == Vector{4, 1});

  DenseLayer wide = DenseLayer::Zeros(3, 2);
  CHECK(KindOf([&] { DenseForward(Vector{1, 1}, wide); }) == ErrorKind::kShape);
}

TEST_CASE("softmax examples and properties") {
  Vector u = Softmax(Vector{0, 0, 0});
  for (double p : u) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));

  Vector q = Softmax(Vector{std::log(1.0), std::log(3.0)});
  CHECK(std::abs(q[0] - 0.25) < 1e-15);
  CHECK(std::abs(q[1] - 0.75) < 1e-15);

  Vector big = Softmax(Vector{1000, 1000});
  CHECK(big[0] == 0.5);
  CHECK(big[1] == 0.5);

  CHECK(KindOf([] { Softmax(Vector{0, std::nan("")}); }) == ErrorKind::kNumeric);

  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    Vector logits = RandomVector(1 + rng.UniformIndex(12), 20.0, &rng);
    Vector p = Softmax(logits);
    double sum = 0;
    for (double v : p) {
      CHECK(v > 0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    const double shift = rng.Uniform(-50, 50);
    Vector shifted = logits;
    for (double &v : shifted) v += shift;
    CHECK(MaxRelativeError(p, Softmax(shifted), 1e-300) < 1e-9);
  }
}

TEST_CASE("log_sum_exp examples and properties") {
  CHECK(LogSumExp(Vector{-3.25}) == -3.25);
  CHECK(std::abs(LogSumExp(Vector{std::log(2.0), std::log(3.0)}) - std::log(5.0)) < 1e-15);
  CHECK(std::abs(LogSumExp(Vector{-1e9, 0})) < 1e-12);
  CHECK(KindOf([] { LogSumExp(Vector{}); }) == ErrorKind::kContract);

  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    Vector xs = RandomVector(1 + rng.UniformIndex(8), 5.0, &rng);
    const double lse = LogSumExp(xs);
    double mx = xs[0], direct = 0;
    for (double x : xs) {
      mx = std::max(mx, x);
      direct += std::exp(x);
    }
    CHECK(lse >= mx);
    CHECK(std::abs(lse - std::log(direct)) < 1e-12);
    Vector rev(xs.rbegin(), xs.rend());
    CHECK(std::abs(lse - LogSumExp(rev)) < 1e-12);
    // associativity through the pairwise form
    double pair = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) pair = LogAdd(pair, xs[i]);
    CHECK(std::abs(lse - pair) < 1e-12);
  }
  CHECK(LogAdd(-std::numeric_limits<double>::infinity(), 1.5) == 1.5);
}

TEST_CASE("recurrent_forward examples") {
  RecurrentLayer zero = RecurrentLayer::Zeros(2, 3);
  CHECK(RecurrentForward({}, zero).empty());
  Sequence out = RecurrentForward({{1, 2}, {-3, 4}}, zero);
  REQUIRE(out.size() == 2);
  for (const auto &h : out) CHECK(h == Vector{0, 0, 0});

  RecurrentLayer id{Matrix::Identity(1), Matrix(1, 1), {0}};
  Sequence one = RecurrentForward({{0.5}}, id);
  CHECK(one[0][0] == std::tanh(0.5));

  CHECK(KindOf([&] { RecurrentForward({{1.0}}, zero); }) == ErrorKind::kShape);
}

TEST_CASE("bce and cross entropy") {
  CHECK(std::abs(BceLoss(0.5, 1) - std::log(2.0)) < 1e-15);
  CHECK(BceLoss(1.0, 1) < 1e-6);
  CHECK(std::abs(BceLoss(0.9, 0) + std::log(0.1)) < 1e-12);
  CHECK(KindOf([] { BceLoss(0.5, 2); }) == ErrorKind::kContract);

  CHECK(CrossEntropyLoss(Vector{1, 0, 0}, 0) < 1e-12);
  CHECK(std::abs(CrossEntropyLoss(Vector{0.25, 0.75}, 1) + std::log(0.75)) < 1e-15);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(CrossEntropyLoss(Vector{0.25, 0.25, 0.25, 0.25}, k) - std::log(4.0)) < 1e-15);
  }
  CHECK(KindOf([] { CrossEntropyLoss(Vector{0.5, 0.5}, 2); }) == ErrorKind::kContract);

  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double p = rng.Uniform(0.001, 0.999);
    const int c = static_cast<int>(rng.UniformIndex(2));
    CHECK(BceLoss(p, c) >= 0);
    CHECK(BceLoss(p, c) >= BceLoss(c, c));
  }
}

TEST_CASE("finite_diff_gradient examples") {
  auto sq = [](std::span<const double> t) { return t[0] * t[0]; };
  CHECK(std::abs(FiniteDiffGradient(sq, Vector{3.0})[0] - 6.0) < 1e-6);
  auto cst = [](std::span<const double>) { return 4.2; };
  for (double g : FiniteDiffGradient(cst, Vector{1, 2, 3})) CHECK(g == 0.0);
  auto sn = [](std::span<const double> t) { return std::sin(t[0]); };
  CHECK(std::abs(FiniteDiffGradient(sn, Vector{0.0})[0] - 1.0) < 1e-6);
  auto bad = [](std::span<const double>) { return std::nan(""); };
  CHECK(KindOf([&] { FiniteDiffGradient(bad, Vector{0.0}); }) == ErrorKind::kNumeric);
}

TEST_CASE("sgd_step examples") {
  Vector theta{1, 2};
  SgdStep(theta, Vector{1, 1}, 0.1);
  CHECK(std::abs(theta[0] - 0.9) < 1e-15);
  CHECK(std::abs(theta[1] - 1.9) < 1e-15);

  Vector same{1.5, -2.5};
  SgdStep(same, Vector{0, 0}, 0.3);
  CHECK(same == Vector{1.5, -2.5});

  Rng rng(3);
  Vector frozen = RandomVector(16, 1.0, &rng);
  const Vector before = frozen;
  SgdStep(frozen, RandomVector(16, 1.0, &rng), 0.7, /*frozen=*/true);
  CHECK(std::memcmp(frozen.data(), before.data(), 16 * sizeof(double)) == 0);

  CHECK(KindOf([&] { SgdStep(theta, Vector{1}, 0.1); }) == ErrorKind::kShape);
}

TEST_CASE("dense and recurrent backward match finite differences") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t in = 1 + rng.UniformIndex(4), hid = 1 + rng.UniformIndex(4);
    const std::size_t steps = rng.UniformIndex(5);
    RecurrentLayer rec = RecurrentLayer::Zeros(in, hid);
    InitUniform(&rec, &rng);
    for (double &b : rec.bias) b = rng.Uniform(-0.5, 0.5);
    DenseLayer head = DenseLayer::Zeros(hid, 2);
    InitUniform(&head, &rng);
    Sequence xs;
    for (std::size_t t = 0; t < steps; ++t) xs.push_back(RandomVector(in, 1.0, &rng));
    Vector weights = RandomVector(2, 1.0, &rng);

    // L = sum_t w . (head h_t)
    auto loss_of = [&](const RecurrentLayer &r, const Sequence &inputs) {
      double total = 0;
      for (const Vector &h : RecurrentForward(inputs, r)) {
        total += Dot(weights, DenseForward(h, head));
      }
      return total;
    };

    Sequence hs = RecurrentForward(xs, rec);
    Sequence dh;
    DenseLayer head_grad = DenseLayer::Zeros(hid, 2);
    for (const Vector &h : hs) {
      Vector d(hid, 0.0);
      DenseBackward(h, head, weights, &head_grad, d);
      dh.push_back(d);
    }
    RecurrentLayer grad = RecurrentLayer::Zeros(in, hid);
    Sequence dx;
    RecurrentBackward(xs, hs, rec, dh, &grad, &dx);

    auto check_block = [&](Matrix *param, const Matrix &analytic) {
      Vector base(param->values().begin(), param->values().end());
      auto f = [&](std::span<const double> v) {
        std::copy(v.begin(), v.end(), param->values().begin());
        double l = loss_of(rec, xs);
        std::copy(base.begin(), base.end(), param->values().begin());
        return l;
      };
      CHECK(MaxRelativeError(analytic.values(), FiniteDiffGradient(f, base), 1e-6) < 1e-4);
    };
    check_block(&rec.input_weight, grad.input_weight);
    check_block(&rec.recurrent_weight, grad.recurrent_weight);

    for (std::size_t t = 0; t < steps; ++t) {
      Sequence probe = xs;
      auto f = [&](std::span<const double> v) {
        probe[t].assign(v.begin(), v.end());
        return loss_of(rec, probe);
      };
      CHECK(MaxRelativeError(dx[t], FiniteDiffGradient(f, xs[t]), 1e-6) < 1e-4);
    }
  }
}

TEST_CASE("matrix binary format") {
  Matrix m(2, 3, {1, 2, 3, 4, 5, -0.5});
  std::string bytes = EncodeMatrix(m);
  REQUIRE(bytes.size() == 12 + 6 * 8);
  CHECK(bytes.substr(0, 4) == "TDM1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 2);
  CHECK(static_cast<unsigned char>(bytes[8]) == 3);
  // 1.0 = 0x3FF0000000000000 little-endian
  CHECK(static_cast<unsigned char>(bytes[12 + 7]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[12 + 6]) == 0xf0);

  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix r(rng.UniformIndex(5), rng.UniformIndex(5));
    for (double &v : r.values()) v = rng.Normal() * 1e3;
    CHECK(DecodeMatrix(EncodeMatrix(r)) == r);
  }
  CHECK(KindOf([] { DecodeMatrix("TDM2xxxxxxxx"); }) == ErrorKind::kData);
  CHECK(KindOf([&] { DecodeMatrix(bytes.substr(0, bytes.size() - 1)); }) == ErrorKind::kData);
}

TEST_CASE("rng determinism and index uniformity") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.Next() == b.Next());
  CHECK(DeriveSeed(1, "init") == DeriveSeed(1, "init"));
  CHECK(DeriveSeed(1, "init") != DeriveSeed(1, "shuffle"));
  CHECK(DeriveSeed(1, "init", 0) != DeriveSeed(1, "init", 1));
  Rng c(5);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++counts[c.UniformIndex(3)];
  for (int k : counts) CHECK(std::abs(k - 10000) < 300);
}
