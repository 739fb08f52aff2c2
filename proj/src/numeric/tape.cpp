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

#include "gentac/numeric/tape.hpp"

#include <cmath>
#include <limits>

namespace gentac::numeric {

// ---- ParameterSet ---------------------------------------------------------

Parameter& ParameterSet::add(std::string name, Matrix value) {
  if (find(name) != nullptr) throw NumericError("duplicate parameter name: " + name);
  params_.push_back(std::make_unique<Parameter>(std::move(name), std::move(value)));
  return *params_.back();
}

const Parameter* ParameterSet::find(std::string_view name) const {
  for (const auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

Parameter& ParameterSet::at(std::string_view name) {
  for (auto& p : params_)
    if (p->name == name) return *p;
  throw NumericError("unknown parameter: " + std::string(name));
}

const Parameter& ParameterSet::at(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw NumericError("unknown parameter: " + std::string(name));
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

Index ParameterSet::scalar_count() const {
  Index n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

// ---- Tape -----------------------------------------------------------------

const Matrix& Var::value() const {
  if (!valid()) throw NumericError("use of a detached variable");
  return tape_->value(id_);
}

Var Tape::constant(Matrix value) {
  check_finite(value, "constant");
  nodes_.push_back(Node{std::move(value), {}, false, nullptr, nullptr});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(Parameter& p) {
  check_finite(p.value, "parameter " + p.name);
  nodes_.push_back(Node{p.value, {}, false, nullptr, &p});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::push(Matrix value, BackwardFn backward, std::string_view op) {
  check_finite(value, op);
  nodes_.push_back(Node{std::move(value), {}, false, std::move(backward), nullptr});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::grad_slot(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.has_grad) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::accumulate(int id, const Eigen::Ref<const Matrix>& g) { grad_slot(id) += g; }

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[static_cast<std::size_t>(v.id())];
  if (!n.has_grad) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this || !loss.valid()) throw NumericError("backward on a detached graph");
  if (loss.rows() != 1 || loss.cols() != 1) throw NumericError("backward expects a scalar loss");
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad.resize(0, 0);
  }
  grad_slot(loss.id()).setOnes();
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.has_grad) continue;
    if (n.param != nullptr) {
      n.param->grad += n.grad;
    } else if (n.backward) {
      // The callback may grow other nodes' grads but never this one.
      const Matrix g = n.grad;
      n.backward(*this, id, g);
    }
  }
}

// ---- elementary ops ---------------------------------------------------------

namespace {

void require_same_tape(Var a, Var b, std::string_view op) {
  if (a.tape() != b.tape() || !a.valid() || !b.valid())
    throw NumericError(std::string(op) + ": operands live on different tapes");
}

void require_same_shape(Var a, Var b, std::string_view op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw NumericError(std::string(op) + ": shape mismatch");
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_tape(a, b, "matmul");
  if (a.cols() != b.rows()) throw NumericError("matmul: inner dimensions disagree");
  Tape& t = *a.tape();
  const int ia = a.id(), ib = b.id();
  return t.push(a.value() * b.value(),
                [ia, ib](Tape& t, int, const Matrix& g) {
                  t.accumulate(ia, g * t.value(ib).transpose());
                  t.accumulate(ib, t.value(ia).transpose() * g);
                },
                "matmul");
}

Var operator+(Var a, Var b) {
  require_same_tape(a, b, "add");
  require_same_shape(a, b, "add");
  const int ia = a.id(), ib = b.id();
  return a.tape()->push(a.value() + b.value(),
                        [ia, ib](Tape& t, int, const Matrix& g) {
                          t.accumulate(ia, g);
                          t.accumulate(ib, g);
                        },
                        "add");
}

Var operator-(Var a, Var b) {
  require_same_tape(a, b, "sub");
  require_same_shape(a, b, "sub");
  const int ia = a.id(), ib = b.id();
  return a.tape()->push(a.value() - b.value(),
                        [ia, ib](Tape& t, int, const Matrix& g) {
                          t.accumulate(ia, g);
                          t.accumulate(ib, -g);
                        },
                        "sub");
}

Var add_row(Var a, Var row) {
  require_same_tape(a, row, "add_row");
  if (row.rows() != 1 || row.cols() != a.cols()) throw NumericError("add_row: shape mismatch");
  const int ia = a.id(), ir = row.id();
  Matrix out = a.value().rowwise() + row.value().row(0);
  return a.tape()->push(std::move(out),
                        [ia, ir](Tape& t, int, const Matrix& g) {
                          t.accumulate(ia, g);
                          t.accumulate(ir, g.colwise().sum());
                        },
                        "add_row");
}

Var hadamard(Var a, Var b) {
  require_same_tape(a, b, "hadamard");
  require_same_shape(a, b, "hadamard");
  const int ia = a.id(), ib = b.id();
  return a.tape()->push(a.value().cwiseProduct(b.value()),
                        [ia, ib](Tape& t, int, const Matrix& g) {
                          t.accumulate(ia, g.cwiseProduct(t.value(ib)));
                          t.accumulate(ib, g.cwiseProduct(t.value(ia)));
                        },
                        "hadamard");
}

Var scale(Var a, double factor) {
  const int ia = a.id();
  return a.tape()->push(a.value() * factor,
                        [ia, factor](Tape& t, int, const Matrix& g) { t.accumulate(ia, g * factor); },
                        "scale");
}

Var tanh(Var a) {
  const int ia = a.id();
  Matrix out = a.value().array().tanh().matrix();
  return a.tape()->push(std::move(out),
                        [ia](Tape& t, int self, const Matrix& g) {
                          const Matrix& y = t.value(self);
                          t.accumulate(ia, (g.array() * (1.0 - y.array().square())).matrix());
                        },
                        "tanh");
}

Var relu(Var a) {
  const int ia = a.id();
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape()->push(std::move(out),
                        [ia](Tape& t, int, const Matrix& g) {
                          const Matrix& x = t.value(ia);
                          t.accumulate(ia, (x.array() > 0.0).select(g, 0.0).matrix());
                        },
                        "relu");
}

Var softmax_rows(Var a) {
  const int ia = a.id();
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    const double mx = x.row(r).maxCoeff();
    out.row(r) = (x.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return a.tape()->push(std::move(out),
                        [ia](Tape& t, int self, const Matrix& g) {
                          const Matrix& y = t.value(self);
                          Matrix dx(y.rows(), y.cols());
                          for (Index r = 0; r < y.rows(); ++r) {
                            const double dot = g.row(r).dot(y.row(r));
                            dx.row(r) = (y.row(r).array() * (g.row(r).array() - dot)).matrix();
                          }
                          t.accumulate(ia, dx);
                        },
                        "softmax_rows");
}

Var layer_norm_rows(Var x, Var gain, Var bias, double eps) {
  require_same_tape(x, gain, "layer_norm");
  require_same_tape(x, bias, "layer_norm");
  const Index n = x.cols();
  if (n < 1) throw NumericError("layer_norm over an empty axis");
  if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n)
    throw NumericError("layer_norm: gain/bias width mismatch");
  const Matrix& in = x.value();
  Matrix xhat(in.rows(), n);
  Eigen::VectorXd inv_std(in.rows());
  for (Index r = 0; r < in.rows(); ++r) {
    const double mu = in.row(r).mean();
    const double var = (in.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = ((in.row(r).array() - mu) * inv_std(r)).matrix();
  }
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array()).matrix();
  out.rowwise() += bias.value().row(0);
  const int ix = x.id(), ig = gain.id(), ib = bias.id();
  return x.tape()->push(
      std::move(out),
      [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t, int, const Matrix& g) {
        const Matrix& gamma = t.value(ig);
        t.accumulate(ig, g.cwiseProduct(xhat).colwise().sum());
        t.accumulate(ib, g.colwise().sum());
        Matrix dxhat = (g.array().rowwise() * gamma.row(0).array()).matrix();
        Matrix dx(g.rows(), g.cols());
        const double inv_n = 1.0 / static_cast<double>(g.cols());
        for (Index r = 0; r < g.rows(); ++r) {
          const double m1 = dxhat.row(r).sum() * inv_n;
          const double m2 = dxhat.row(r).dot(xhat.row(r)) * inv_n;
          dx.row(r) = ((dxhat.row(r).array() - m1 - xhat.row(r).array() * m2) * inv_std(r)).matrix();
        }
        t.accumulate(ix, dx);
      },
      "layer_norm");
}

Var sum(Var a) {
  const int ia = a.id();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape()->push(std::move(out),
                        [ia](Tape& t, int, const Matrix& g) {
                          const Matrix& x = t.value(ia);
                          t.accumulate(ia, Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
                        },
                        "sum");
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw NumericError("mean of an empty array");
  return scale(sum(a), 1.0 / n);
}

Var add_indexed_rows(Var x, Var table, std::span<const Index> index) {
  require_same_tape(x, table, "add_indexed_rows");
  if (static_cast<Index>(index.size()) != x.rows() || table.cols() != x.cols())
    throw NumericError("add_indexed_rows: shape mismatch");
  Matrix out = x.value();
  const Matrix& tab = table.value();
  for (Index r = 0; r < out.rows(); ++r) {
    const Index i = index[static_cast<std::size_t>(r)];
    if (i < 0 || i >= tab.rows()) throw NumericError("add_indexed_rows: index out of range");
    out.row(r) += tab.row(i);
  }
  std::vector<Index> idx(index.begin(), index.end());
  const int ix = x.id(), it = table.id();
  return x.tape()->push(std::move(out),
                        [ix, it, idx = std::move(idx)](Tape& t, int, const Matrix& g) {
                          t.accumulate(ix, g);
                          Matrix& gt = t.grad_slot(it);
                          for (std::size_t r = 0; r < idx.size(); ++r)
                            gt.row(idx[r]) += g.row(static_cast<Index>(r));
                        },
                        "add_indexed_rows");
}

Var gather_rows(Var table, std::span<const Index> index) {
  const Matrix& tab = table.value();
  Matrix out(static_cast<Index>(index.size()), tab.cols());
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] < 0 || index[r] >= tab.rows()) throw NumericError("gather_rows: index out of range");
    out.row(static_cast<Index>(r)) = tab.row(index[r]);
  }
  std::vector<Index> idx(index.begin(), index.end());
  const int it = table.id();
  return table.tape()->push(std::move(out),
                            [it, idx = std::move(idx)](Tape& t, int, const Matrix& g) {
                              Matrix& gt = t.grad_slot(it);
                              for (std::size_t r = 0; r < idx.size(); ++r)
                                gt.row(idx[r]) += g.row(static_cast<Index>(r));
                            },
                            "gather_rows");
}

Var weighted_mse(Var pred, const Matrix& target, const Matrix& weight) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols() ||
      weight.rows() != target.rows() || weight.cols() != target.cols())
    throw NumericError("weighted_mse: shape mismatch");
  const double wsum = weight.sum();
  if (!(wsum > 0.0)) throw NumericError("weighted_mse: no weighted entries");
  Matrix diff = pred.value() - target;
  Matrix out(1, 1);
  out(0, 0) = (weight.array() * diff.array().square()).sum() / wsum;
  const int ip = pred.id();
  return pred.tape()->push(std::move(out),
                           [ip, diff = std::move(diff), weight, wsum](Tape& t, int, const Matrix& g) {
                             t.accumulate(ip, (2.0 * g(0, 0) / wsum) *
                                                  (weight.array() * diff.array()).matrix());
                           },
                           "weighted_mse");
}

Var cross_entropy(Var logits, std::span<const int> labels, double divisor) {
  const Matrix& z = logits.value();
  if (static_cast<Index>(labels.size()) != z.rows())
    throw NumericError("cross_entropy: label count mismatch");
  if (!(divisor > 0.0)) throw NumericError("cross_entropy: divisor must be positive");
  Matrix probs(z.rows(), z.cols());
  double total = 0.0;
  for (Index r = 0; r < z.rows(); ++r) {
    const double mx = z.row(r).maxCoeff();
    probs.row(r) = (z.row(r).array() - mx).exp().matrix();
    const double s = probs.row(r).sum();
    probs.row(r) /= s;
    const int y = labels[static_cast<std::size_t>(r)];
    if (y < 0) continue;
    if (y >= z.cols()) throw NumericError("cross_entropy: label out of range");
    total += (mx + std::log(s)) - z(r, y);
  }
  Matrix out(1, 1);
  out(0, 0) = total / divisor;
  std::vector<int> ys(labels.begin(), labels.end());
  const int il = logits.id();
  return logits.tape()->push(
      std::move(out),
      [il, probs = std::move(probs), ys = std::move(ys), divisor](Tape& t, int, const Matrix& g) {
        Matrix d = Matrix::Zero(probs.rows(), probs.cols());
        for (Index r = 0; r < probs.rows(); ++r) {
          const int y = ys[static_cast<std::size_t>(r)];
          if (y < 0) continue;
          d.row(r) = probs.row(r);
          d(r, y) -= 1.0;
        }
        t.accumulate(il, d * (g(0, 0) / divisor));
      },
      "cross_entropy");
}

// ---- attention ------------------------------------------------------------

namespace {

struct GroupCache {
  std::vector<Index> keys;  // visible members
  Matrix q, k, v;           // gathered rows, full width
  std::vector<Matrix> weights;  // per head: members x keys
};

std::vector<Index> visible_members(const std::vector<Index>& members,
                                   std::span<const std::uint8_t> visible) {
  std::vector<Index> keys;
  keys.reserve(members.size());
  for (Index r : members)
    if (visible[static_cast<std::size_t>(r)] != 0) keys.push_back(r);
  return keys;
}

void softmax_in_place(Matrix& s) {
  for (Index r = 0; r < s.rows(); ++r) {
    const double mx = s.row(r).maxCoeff();
    s.row(r) = (s.row(r).array() - mx).exp().matrix();
    s.row(r) /= s.row(r).sum();
  }
}

void validate_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                        std::span<const std::uint8_t> visible, int heads) {
  if (q.rows() != k.rows() || q.rows() != v.rows() || q.cols() != k.cols() || q.cols() != v.cols())
    throw NumericError("masked_attention: q/k/v shape mismatch");
  if (static_cast<Index>(visible.size()) != q.rows())
    throw NumericError("masked_attention: visibility length mismatch");
  if (heads < 1 || q.cols() % heads != 0)
    throw NumericError("masked_attention: width not divisible by head count");
}

Matrix attention_impl(const Matrix& q, const Matrix& k, const Matrix& v, const AttentionGroups& groups,
                      std::span<const std::uint8_t> visible, int heads,
                      std::vector<GroupCache>* caches) {
  validate_attention(q, k, v, visible, heads);
  const Index dh = q.cols() / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Matrix out = Matrix::Zero(q.rows(), q.cols());
  if (caches) caches->resize(groups.members.size());
  for (std::size_t gi = 0; gi < groups.members.size(); ++gi) {
    const auto& members = groups.members[gi];
    GroupCache local;
    GroupCache& c = caches ? (*caches)[gi] : local;
    c.keys = visible_members(members, visible);
    if (c.keys.empty()) continue;
    c.q = q(members, Eigen::all);
    c.k = k(c.keys, Eigen::all);
    c.v = v(c.keys, Eigen::all);
    c.weights.resize(static_cast<std::size_t>(heads));
    Matrix o(static_cast<Index>(members.size()), q.cols());
    for (int h = 0; h < heads; ++h) {
      const Index c0 = h * dh;
      Matrix s = (c.q.middleCols(c0, dh) * c.k.middleCols(c0, dh).transpose()) * scale;
      softmax_in_place(s);
      o.middleCols(c0, dh) = s * c.v.middleCols(c0, dh);
      c.weights[static_cast<std::size_t>(h)] = std::move(s);
    }
    out(members, Eigen::all) = o;
  }
  return out;
}

}  // namespace

Matrix masked_attention_forward(const Matrix& q, const Matrix& k, const Matrix& v,
                                const AttentionGroups& groups,
                                std::span<const std::uint8_t> visible, int heads,
                                std::vector<Matrix>* weights) {
  if (!weights) return attention_impl(q, k, v, groups, visible, heads, nullptr);
  std::vector<GroupCache> caches;
  Matrix out = attention_impl(q, k, v, groups, visible, heads, &caches);
  weights->assign(groups.members.size() * static_cast<std::size_t>(heads), Matrix());
  for (std::size_t g = 0; g < caches.size(); ++g)
    for (std::size_t h = 0; h < caches[g].weights.size(); ++h)
      (*weights)[g * static_cast<std::size_t>(heads) + h] = caches[g].weights[h];
  return out;
}

Var masked_attention(Var q, Var k, Var v, const AttentionGroups& groups,
                     std::span<const std::uint8_t> visible, int heads) {
  require_same_tape(q, k, "masked_attention");
  require_same_tape(q, v, "masked_attention");
  auto caches = std::make_shared<std::vector<GroupCache>>();
  Matrix out = attention_impl(q.value(), k.value(), v.value(), groups, visible, heads, caches.get());
  const int iq = q.id(), ik = k.id(), iv = v.id();
  const Index width = q.cols();
  return q.tape()->push(
      std::move(out),
      [iq, ik, iv, heads, width, caches, members = groups.members](Tape& t, int, const Matrix& g) {
        const Index dh = width / heads;
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
        Matrix& gq = t.grad_slot(iq);
        Matrix& gk = t.grad_slot(ik);
        Matrix& gv = t.grad_slot(iv);
        for (std::size_t gi = 0; gi < members.size(); ++gi) {
          const GroupCache& c = (*caches)[gi];
          if (c.keys.empty()) continue;
          const Matrix go = g(members[gi], Eigen::all);
          Matrix dq(c.q.rows(), width), dk(c.k.rows(), width), dv(c.v.rows(), width);
          for (int h = 0; h < heads; ++h) {
            const Index c0 = h * dh;
            const Matrix& a = c.weights[static_cast<std::size_t>(h)];
            const auto goh = go.middleCols(c0, dh);
            Matrix da = goh * c.v.middleCols(c0, dh).transpose();
            dv.middleCols(c0, dh) = a.transpose() * goh;
            Matrix ds = a.cwiseProduct(da);
            const Eigen::VectorXd rows = ds.rowwise().sum();
            ds -= a.cwiseProduct(rows.replicate(1, a.cols()));
            dq.middleCols(c0, dh) = ds * c.k.middleCols(c0, dh) * scale;
            dk.middleCols(c0, dh) = ds.transpose() * c.q.middleCols(c0, dh) * scale;
          }
          gq(members[gi], Eigen::all) += dq;
          gk(c.keys, Eigen::all) += dk;
          gv(c.keys, Eigen::all) += dv;
        }
      },
      "masked_attention");
}

Var attention_pool(Var h, Var scores, const AttentionGroups& groups,
                   std::span<const std::uint8_t> visible) {
  require_same_tape(h, scores, "attention_pool");
  if (scores.cols() != 1 || scores.rows() != h.rows() ||
      static_cast<Index>(visible.size()) != h.rows())
    throw NumericError("attention_pool: shape mismatch");
  const Matrix& hv = h.value();
  const Matrix& sv = scores.value();
  const auto n_groups = static_cast<Index>(groups.members.size());
  Matrix out = Matrix::Zero(n_groups, hv.cols());
  auto keys = std::make_shared<std::vector<std::vector<Index>>>(groups.members.size());
  auto weights = std::make_shared<std::vector<Eigen::VectorXd>>(groups.members.size());
  for (Index g = 0; g < n_groups; ++g) {
    auto& kk = (*keys)[static_cast<std::size_t>(g)];
    kk = visible_members(groups.members[static_cast<std::size_t>(g)], visible);
    if (kk.empty()) throw NumericError("attention_pool: every token of a sample is masked");
    Eigen::VectorXd a = sv(kk, 0);
    a = (a.array() - a.maxCoeff()).exp().matrix();
    a /= a.sum();
    out.row(g) = a.transpose() * hv(kk, Eigen::all);
    (*weights)[static_cast<std::size_t>(g)] = std::move(a);
  }
  const int ih = h.id(), is = scores.id();
  return h.tape()->push(
      std::move(out),
      [ih, is, keys, weights](Tape& t, int, const Matrix& g) {
        const Matrix& hv = t.value(ih);
        Matrix& gh = t.grad_slot(ih);
        Matrix& gs = t.grad_slot(is);
        for (std::size_t gi = 0; gi < keys->size(); ++gi) {
          const auto& kk = (*keys)[gi];
          const Eigen::VectorXd& a = (*weights)[gi];
          const auto gout = g.row(static_cast<Index>(gi));
          const Eigen::VectorXd da = hv(kk, Eigen::all) * gout.transpose();
          const double dot = a.dot(da);
          for (std::size_t j = 0; j < kk.size(); ++j) {
            const auto r = static_cast<Index>(j);
            gh.row(kk[j]) += a(r) * gout;
            gs(kk[j], 0) += a(r) * (da(r) - dot);
          }
        }
      },
      "attention_pool");
}

}  // namespace gentac::numeric
