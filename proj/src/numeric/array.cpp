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

#include "gentac/numeric/array.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace gentac::numeric {

namespace {

Index product(const std::vector<Index>& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

std::string shape_string(const std::vector<Index>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

}  // namespace

void check_finite(const Eigen::Ref<const Matrix>& m, std::string_view op) {
  if (!m.allFinite()) throw NumericError("non-finite value produced by " + std::string(op));
}

Array::Array(std::vector<Index> shape) : shape_(std::move(shape)) {
  for (Index e : shape_)
    if (e < 0) throw NumericError("negative extent in shape " + shape_string(shape_));
  data_.assign(static_cast<std::size_t>(product(shape_)), 0.0);
}

Array::Array(std::vector<Index> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (product(shape_) != static_cast<Index>(data_.size()))
    throw NumericError("shape " + shape_string(shape_) + " does not match " +
                       std::to_string(data_.size()) + " values");
  for (double v : data_)
    if (!std::isfinite(v)) throw NumericError("non-finite value in Array construction");
}

Array Array::from_matrix(const Eigen::Ref<const Matrix>& m) {
  Array out({m.rows(), m.cols()});
  out.matrix() = m;
  return out;
}

Index Array::extent(Index axis) const {
  if (axis < 0) axis += rank();
  if (axis < 0 || axis >= rank()) throw NumericError("axis out of range");
  return shape_[static_cast<std::size_t>(axis)];
}

Index Array::offset(std::initializer_list<Index> idx) const {
  if (static_cast<Index>(idx.size()) != rank()) throw NumericError("index rank mismatch");
  Index off = 0;
  std::size_t a = 0;
  for (Index i : idx) {
    if (i < 0 || i >= shape_[a]) throw NumericError("index out of range");
    off = off * shape_[a] + i;
    ++a;
  }
  return off;
}

double Array::operator()(std::initializer_list<Index> idx) const {
  return data_[static_cast<std::size_t>(offset(idx))];
}

double& Array::operator()(std::initializer_list<Index> idx) {
  return data_[static_cast<std::size_t>(offset(idx))];
}

Eigen::Map<const Matrix> Array::matrix() const {
  const Index cols = shape_.empty() ? 1 : shape_.back();
  const Index rows = cols == 0 ? 0 : size() / cols;
  return {data_.data(), rows, cols};
}

Eigen::Map<Matrix> Array::matrix() {
  const Index cols = shape_.empty() ? 1 : shape_.back();
  const Index rows = cols == 0 ? 0 : size() / cols;
  return {data_.data(), rows, cols};
}

Array Array::reshaped(std::vector<Index> shape) const { return Array(std::move(shape), data_); }

Array matmul(const Array& a, const Array& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw NumericError("matmul expects rank-2 operands, got " + shape_string(a.shape()) + " and " +
                       shape_string(b.shape()));
  if (a.extent(1) != b.extent(0))
    throw NumericError("matmul inner dimensions disagree: " + shape_string(a.shape()) + " x " +
                       shape_string(b.shape()));
  Matrix product = a.matrix() * b.matrix();
  check_finite(product, "matmul");
  return Array::from_matrix(product);
}

Array softmax(const Array& x, Index axis) {
  if (axis < 0) axis += x.rank();
  if (axis < 0 || axis >= x.rank()) throw NumericError("softmax axis out of range");
  const auto& shape = x.shape();
  Index outer = 1, inner = 1;
  for (Index i = 0; i < axis; ++i) outer *= shape[static_cast<std::size_t>(i)];
  for (Index i = axis + 1; i < x.rank(); ++i) inner *= shape[static_cast<std::size_t>(i)];
  const Index n = shape[static_cast<std::size_t>(axis)];

  Array out(shape);
  auto src = x.data();
  auto dst = out.data();
  for (Index o = 0; o < outer; ++o) {
    for (Index i = 0; i < inner; ++i) {
      auto at = [&](Index k) { return static_cast<std::size_t>((o * n + k) * inner + i); };
      double mx = -std::numeric_limits<double>::infinity();
      for (Index k = 0; k < n; ++k) mx = std::max(mx, src[at(k)]);
      double sum = 0.0;
      for (Index k = 0; k < n; ++k) {
        dst[at(k)] = std::exp(src[at(k)] - mx);
        sum += dst[at(k)];
      }
      for (Index k = 0; k < n; ++k) dst[at(k)] /= sum;
    }
  }
  check_finite(out.matrix(), "softmax");
  return out;
}

Array layer_norm(const Array& x, std::span<const double> gain, std::span<const double> bias,
                 double eps) {
  const Index width = x.rank() == 0 ? 1 : x.shape().back();
  if (width < 1) throw NumericError("layer_norm over an empty axis");
  if (static_cast<Index>(gain.size()) != width || static_cast<Index>(bias.size()) != width)
    throw NumericError("layer_norm gain/bias width mismatch");
  Array out(x.shape());
  auto in = x.matrix();
  auto res = out.matrix();
  Eigen::Map<const RowVector> g(gain.data(), width), b(bias.data(), width);
  for (Index r = 0; r < in.rows(); ++r) {
    const double mean = in.row(r).mean();
    const double var = (in.row(r).array() - mean).square().mean();
    res.row(r) = ((in.row(r).array() - mean) / std::sqrt(var + eps)).matrix();
    res.row(r) = res.row(r).cwiseProduct(g) + b;
  }
  check_finite(res, "layer_norm");
  return out;
}

}  // namespace gentac::numeric
