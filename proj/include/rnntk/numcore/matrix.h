// include/rnntk/numcore/matrix.h
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

#ifndef RNNTK_NUMCORE_MATRIX_H_
#define RNNTK_NUMCORE_MATRIX_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rnntk {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> Row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void Fill(double v);
  void SetZero() { Fill(0.0); }

  bool operator==(const Matrix &other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// y = m * x
Vector MatVec(const Matrix &m, std::span<const double> x);
// y += m * x
void AddMatVec(const Matrix &m, std::span<const double> x, std::span<double> y);
// y += m^T * x
void AddMatTVec(const Matrix &m, std::span<const double> x, std::span<double> y);
// m += scale * a b^T
void AddOuter(std::span<const double> a, std::span<const double> b,
              double scale, Matrix *m);

void AddInPlace(std::span<const double> x, std::span<double> y);
double Dot(std::span<const double> a, std::span<const double> b);

std::string ShapeString(const Matrix &m);

}  // namespace rnntk

#endif  // RNNTK_NUMCORE_MATRIX_H_
