// Copyright 2026 The gentac Authors
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

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gentac::numeric {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// Raised for shape violations and for any op that produces NaN/Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws NumericError naming `op` if `m` holds a non-finite value.
void check_finite(const Eigen::Ref<const Matrix>& m, std::string_view op);

/// Dense row-major array of doubles with an arbitrary shape.
///
/// Arrays are values: ops never mutate their inputs. Rank-2 views through
/// `matrix()` collapse every leading axis into rows.
class Array {
 public:
  Array() = default;
  explicit Array(std::vector<Index> shape);
  Array(std::vector<Index> shape, std::vector<double> data);

  static Array from_matrix(const Eigen::Ref<const Matrix>& m);

  const std::vector<Index>& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index size() const { return static_cast<Index>(data_.size()); }
  Index extent(Index axis) const;

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double operator()(std::initializer_list<Index> idx) const;
  double& operator()(std::initializer_list<Index> idx);

  /// (prod(shape[:-1])) x shape.back() view.
  Eigen::Map<const Matrix> matrix() const;
  Eigen::Map<Matrix> matrix();

  Array reshaped(std::vector<Index> shape) const;

  friend bool operator==(const Array&, const Array&) = default;

 private:
  Index offset(std::initializer_list<Index> idx) const;

  std::vector<Index> shape_;
  std::vector<double> data_;
};

/// Standard product of a rank-2 [m x k] and [k x n] array.
Array matmul(const Array& a, const Array& b);

/// Max-subtracted softmax along `axis`.
Array softmax(const Array& x, Index axis);

/// Normalizes each slice along the last axis, then applies gain and bias.
Array layer_norm(const Array& x, std::span<const double> gain, std::span<const double> bias,
                 double eps);

}  // namespace gentac::numeric
