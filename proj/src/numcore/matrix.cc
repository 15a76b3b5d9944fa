// src/numcore/matrix.cc
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

#include "rnntk/numcore/matrix.h"

#include <algorithm>

#include "rnntk/errors.h"

namespace rnntk {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  Require(data_.size() == rows * cols, ErrorKind::kShape,
          "matrix data length " + std::to_string(data_.size()) +
              " does not match " + std::to_string(rows) + "x" +
              std::to_string(cols));
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Vector MatVec(const Matrix &m, std::span<const double> x) {
  Vector y(m.rows(), 0.0);
  AddMatVec(m, x, y);
  return y;
}

void AddMatVec(const Matrix &m, std::span<const double> x, std::span<double> y) {
  Require(x.size() == m.cols() && y.size() == m.rows(), ErrorKind::kShape,
          "matvec with " + ShapeString(m) + " and vector of dim " +
              std::to_string(x.size()));
  const std::size_t cols = m.cols();
  const double *row = m.values().data();
  for (std::size_t r = 0; r < m.rows(); ++r, row += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

void AddMatTVec(const Matrix &m, std::span<const double> x, std::span<double> y) {
  Require(x.size() == m.rows() && y.size() == m.cols(), ErrorKind::kShape,
          "transposed matvec with " + ShapeString(m) + " and vector of dim " +
              std::to_string(x.size()));
  const std::size_t cols = m.cols();
  const double *row = m.values().data();
  for (std::size_t r = 0; r < m.rows(); ++r, row += cols) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
  }
}

void AddOuter(std::span<const double> a, std::span<const double> b,
              double scale, Matrix *m) {
  Require(a.size() == m->rows() && b.size() == m->cols(), ErrorKind::kShape,
          "outer product does not fit " + ShapeString(*m));
  const std::size_t cols = m->cols();
  double *row = m->values().data();
  for (std::size_t r = 0; r < m->rows(); ++r, row += cols) {
    const double ar = scale * a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
  }
}

void AddInPlace(std::span<const double> x, std::span<double> y) {
  Require(x.size() == y.size(), ErrorKind::kShape, "vector add dim mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += x[i];
}

double Dot(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), ErrorKind::kShape, "dot dim mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

std::string ShapeString(const Matrix &m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace rnntk
