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

#include "gentac/numeric/array.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gentac::numeric {

/// A named trainable matrix with its accumulated gradient.
struct Parameter {
  Parameter(std::string name_, Matrix value_)
      : name(std::move(name_)), value(std::move(value_)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(); }

  std::string name;
  Matrix value;
  Matrix grad;
};

/// Ordered collection of parameters with stable addresses.
class ParameterSet {
 public:
  Parameter& add(std::string name, Matrix value);
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  const Parameter* find(std::string_view name) const;

  void zero_grad();
  Index scalar_count() const;
  std::size_t size() const { return params_.size(); }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.cbegin(); }
  auto end() const { return params_.cend(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

class Tape;

/// Handle to a node on a tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr && id_ >= 0; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, which is a
/// topological order, so backward is a single reverse sweep. One tape per
/// forward pass; not thread-safe.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int self, const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var param(Parameter& p);

  /// Appends an op result; `op` names the op in non-finite diagnostics.
  Var push(Matrix value, BackwardFn backward, std::string_view op);

  /// Seeds d(loss)/d(loss) = 1 and accumulates into every reached Parameter.
  void backward(Var loss);

  const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  /// Gradient of the last backward() w.r.t. a node (zeros if unreached).
  Matrix grad(Var v) const;

  /// Adds `g` into the gradient slot of node `id`.
  void accumulate(int id, const Eigen::Ref<const Matrix>& g);
  Matrix& grad_slot(int id);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
  };

  std::deque<Node> nodes_;
};

// ---- differentiable ops --------------------------------------------------

Var matmul(Var a, Var b);
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
/// Adds a 1 x n row to every row of `a`.
Var add_row(Var a, Var row);
Var hadamard(Var a, Var b);
Var scale(Var a, double factor);
Var tanh(Var a);
Var relu(Var a);
Var softmax_rows(Var a);
/// Per-row layer normalization with 1 x n gain and bias.
Var layer_norm_rows(Var x, Var gain, Var bias, double eps);
Var sum(Var a);
Var mean(Var a);

/// out[r] = x[r] + table[index[r]].
Var add_indexed_rows(Var x, Var table, std::span<const Index> index);
/// out[r] = table[index[r]].
Var gather_rows(Var table, std::span<const Index> index);

/// sum(weight .* (pred - target)^2) / sum(weight); weight is constant.
Var weighted_mse(Var pred, const Matrix& target, const Matrix& weight);

/// Softmax cross-entropy summed over rows whose label >= 0, divided by
/// `divisor`. Rows with label < 0 contribute nothing and receive zero grad.
Var cross_entropy(Var logits, std::span<const int> labels, double divisor);

/// Row partition used by the factorized attention op.
struct AttentionGroups {
  std::vector<std::vector<Index>> members;
};

/// Multi-head scaled dot-product attention restricted to each group.
///
/// q, k, v are R x d with d divisible by `heads`. Within a group every row is
/// a query; only rows with visible[r] != 0 act as keys. A query with no
/// visible key gets a zero output. Invisible rows never enter any visible
/// row's computation.
Var masked_attention(Var q, Var k, Var v, const AttentionGroups& groups,
                     std::span<const std::uint8_t> visible, int heads);

/// Value-level forward of masked_attention; optionally records the weight
/// matrix for each (group, head) as weights[g * heads + h] (queries x visible keys).
Matrix masked_attention_forward(const Matrix& q, const Matrix& k, const Matrix& v,
                                const AttentionGroups& groups,
                                std::span<const std::uint8_t> visible, int heads,
                                std::vector<Matrix>* weights = nullptr);

/// Softmax pooling over each group's visible rows: out[g] = sum_r a_r h[r]
/// with a = softmax(score) over visible rows of g. `scores` is R x 1.
Var attention_pool(Var h, Var scores, const AttentionGroups& groups,
                   std::span<const std::uint8_t> visible);

}  // namespace gentac::numeric
