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

#include "gentac/model/backbone.hpp"

#include "gentac/model/taxonomy.hpp"
#include "gentac/numeric/rng.hpp"

#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>

namespace gentac::model {

using numeric::AttentionGroups;

BackboneConfig BackboneConfig::desk(int per_team) {
  BackboneConfig c;
  c.d = 32;
  c.layers = 2;
  c.heads = 4;
  c.per_team = per_team;
  return c;
}

void BackboneConfig::validate() const {
  if (d <= 0 || layers < 0 || heads <= 0 || per_team <= 0 || l_max <= 0 || mlp_ratio <= 0)
    throw std::invalid_argument("backbone config values must be positive");
  if (d % heads != 0) throw std::invalid_argument("hidden width must be divisible by the head count");
  if (d % 2 != 0) throw std::invalid_argument("hidden width must be even");
}

TokenGrid build_token_grid(const Segment& history, const Segment& future, Task task, int target_side,
                           const GridOptions& options) {
  const Index E = history.entities;
  if (future.frames > 0 && future.entities != E) throw std::invalid_argument("history and future rosters differ");
  if (E % 2 != 1) throw std::invalid_argument("entity axis must be 2N + 1");
  const Index N = (E - 1) / 2;
  TokenGrid g;
  g.entities = E;

  if (task == Task::event) {
    const Index L = options.l_max;
    const Index keep = std::min<Index>(history.frames, L);
    const Segment src = history.slice(history.frames - keep, keep);
    g.frames = L;
    g.history_frames = L;
    g.coords = Matrix::Zero(L * E, 2);
    g.coords.topRows(keep * E) = src.coords;
    g.visible = Mask::Constant(L, E, false);
    g.visible.topRows(keep) = src.visible;
    g.noise_target = Mask::Constant(L, E, false);
    return g;
  }

  if (target_side < 0 || target_side > 1) throw std::invalid_argument("target side must be 0 or 1");
  const Segment all = Segment::concat(history, future);
  g.frames = all.frames;
  g.history_frames = history.frames;
  g.coords = all.coords;
  g.visible = all.visible;
  g.noise_target = Mask::Constant(g.frames, E, false);
  for (Index t = history.frames; t < g.frames; ++t)
    for (Index e = 0; e < E; ++e) {
      const int group = data::Roster::group_of(e, static_cast<int>(N));
      bool target = true;
      if (task == Task::forecast_single) target = group == target_side || (group == 2 && options.ball_is_target);
      g.noise_target(t, e) = target && g.visible(t, e);
    }
  return g;
}

Matrix TokenBatch::noise_weight() const {
  Matrix w(rows(), 2);
  for (Index r = 0; r < rows(); ++r) w.row(r).setConstant(noise_target[static_cast<std::size_t>(r)] ? 1.0 : 0.0);
  return w;
}

TokenBatch stack(const std::vector<const TokenGrid*>& grids, std::vector<int> steps) {
  if (grids.empty()) throw std::invalid_argument("empty batch");
  TokenBatch b;
  b.samples = static_cast<Index>(grids.size());
  b.frames = grids[0]->frames;
  b.entities = grids[0]->entities;
  const Index per = b.frames * b.entities;
  b.coords.resize(b.samples * per, 2);
  b.visible.resize(static_cast<std::size_t>(b.samples * per));
  b.noise_target.resize(b.visible.size());
  for (Index s = 0; s < b.samples; ++s) {
    const TokenGrid& g = *grids[static_cast<std::size_t>(s)];
    if (g.frames != b.frames || g.entities != b.entities) throw std::invalid_argument("grids in a batch must share a shape");
    b.coords.middleRows(s * per, per) = g.coords;
    for (Index t = 0; t < b.frames; ++t)
      for (Index e = 0; e < b.entities; ++e) {
        const auto r = static_cast<std::size_t>(s * per + t * b.entities + e);
        b.visible[r] = g.visible(t, e) ? 1 : 0;
        b.noise_target[r] = g.noise_target(t, e) ? 1 : 0;
      }
  }
  if (!steps.empty() && static_cast<Index>(steps.size()) != b.samples)
    throw std::invalid_argument("one diffusion step per sample");
  b.steps = std::move(steps);
  return b;
}

TokenBatch stack(const TokenGrid& grid, int step) {
  return stack(std::vector<const TokenGrid*>{&grid}, step >= 0 ? std::vector<int>{step} : std::vector<int>{});
}

namespace {

Matrix uniform_init(numeric::Rng& rng, Index rows, Index cols, Index fan_in) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
  return m;
}

Matrix normal_init(numeric::Rng& rng, Index rows, Index cols, double sigma) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = sigma * rng.normal();
  return m;
}

void add_linear(ParameterSet& ps, numeric::Rng& rng, const std::string& name, Index in, Index out) {
  ps.add(name + ".w", uniform_init(rng, in, out, in));
  ps.add(name + ".b", Matrix::Zero(1, out));
}

void add_norm(ParameterSet& ps, const std::string& name, Index d) {
  ps.add(name + ".g", Matrix::Ones(1, d));
  ps.add(name + ".b", Matrix::Zero(1, d));
}

void add_attention(ParameterSet& ps, numeric::Rng& rng, const std::string& name, Index d) {
  add_norm(ps, name + ".ln", d);
  ps.add(name + ".q", uniform_init(rng, d, d, d));
  ps.add(name + ".k", uniform_init(rng, d, d, d));
  ps.add(name + ".v", uniform_init(rng, d, d, d));
  add_linear(ps, rng, name + ".out", d, d);
}

std::string layer_name(int layer, const char* kind) { return "layer" + std::to_string(layer) + "." + kind; }

Var linear(Tape& tape, ParameterSet& ps, const std::string& name, Var x) {
  return numeric::add_row(numeric::matmul(x, tape.param(ps.at(name + ".w"))), tape.param(ps.at(name + ".b")));
}

Var norm(Tape& tape, ParameterSet& ps, const std::string& name, Var x) {
  return numeric::layer_norm_rows(x, tape.param(ps.at(name + ".g")), tape.param(ps.at(name + ".b")), 1e-5);
}

Var attention_block(Tape& tape, Model& model, const std::string& name, Var h, const TokenBatch& batch,
                    const AttentionGroups& groups, std::vector<Matrix>* weights) {
  ParameterSet& ps = model.params();
  const Var x = norm(tape, ps, name + ".ln", h);
  const Var q = numeric::matmul(x, tape.param(ps.at(name + ".q")));
  const Var k = numeric::matmul(x, tape.param(ps.at(name + ".k")));
  const Var v = numeric::matmul(x, tape.param(ps.at(name + ".v")));
  const int heads = model.config().heads;
  if (weights) {
    std::vector<Matrix> w;
    numeric::masked_attention_forward(q.value(), k.value(), v.value(), groups, batch.visible, heads, &w);
    weights->insert(weights->end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  const Var a = numeric::masked_attention(q, k, v, groups, batch.visible, heads);
  return h + linear(tape, ps, name + ".out", a);
}

Var mlp_block(Tape& tape, Model& model, const std::string& name, Var h) {
  ParameterSet& ps = model.params();
  const Var x = norm(tape, ps, name + ".ln", h);
  return h + linear(tape, ps, name + ".fc2", numeric::tanh(linear(tape, ps, name + ".fc1", x)));
}

}  // namespace

Model Model::create(const BackboneConfig& config, std::uint64_t seed) {
  config.validate();
  Model m(config);
  numeric::Rng rng = numeric::Rng(seed).split("init");
  ParameterSet& ps = m.params_;
  const Index d = config.d, E = config.entities();
  add_linear(ps, rng, "embed.in", 2, d);
  ps.add("embed.time", normal_init(rng, config.l_max, d, 0.02));
  ps.add("embed.group", normal_init(rng, 3, d, 0.02));
  ps.add("embed.entity", normal_init(rng, E, d, 0.02));
  ps.add("embed.role", normal_init(rng, 2, d, 0.02));
  if (config.head == HeadKind::noise) add_linear(ps, rng, "embed.step", d, d);
  for (int l = 0; l < config.layers; ++l) {
    add_attention(ps, rng, layer_name(l, "spatial"), d);
    if (config.mlp) {
      add_norm(ps, layer_name(l, "spatial_mlp") + ".ln", d);
      add_linear(ps, rng, layer_name(l, "spatial_mlp") + ".fc1", d, d * config.mlp_ratio);
      add_linear(ps, rng, layer_name(l, "spatial_mlp") + ".fc2", d * config.mlp_ratio, d);
    }
    add_attention(ps, rng, layer_name(l, "temporal"), d);
    if (config.mlp) {
      add_norm(ps, layer_name(l, "temporal_mlp") + ".ln", d);
      add_linear(ps, rng, layer_name(l, "temporal_mlp") + ".fc1", d, d * config.mlp_ratio);
      add_linear(ps, rng, layer_name(l, "temporal_mlp") + ".fc2", d * config.mlp_ratio, d);
    }
  }
  add_norm(ps, "head.ln", d);
  if (config.head == HeadKind::noise) {
    add_linear(ps, rng, "head.noise", d, 2);
  } else {
    add_linear(ps, rng, "pool.hidden", d, d);
    ps.add("pool.score", uniform_init(rng, d, 1, d));
    add_linear(ps, rng, "head.type", d, kTypeCount);
    for (int t = 0; t < kTypeCount; ++t) add_linear(ps, rng, "head.sub" + std::to_string(t), d, subtype_count(t));
  }
  return m;
}

Model Model::clone() const {
  Model m(config_);
  for (const auto& p : params_) m.params_.add(p->name, p->value);
  return m;
}

Matrix step_embedding(int step, int d) {
  Matrix e(1, d);
  const int half = d / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    e(0, i) = std::sin(step * freq);
    e(0, i + half) = std::cos(step * freq);
  }
  return e;
}

Var embed(Tape& tape, Model& model, const TokenBatch& batch) {
  const BackboneConfig& cfg = model.config();
  if (batch.entities != cfg.entities())
    throw std::invalid_argument("batch has " + std::to_string(batch.entities) + " entities, model expects " +
                                std::to_string(cfg.entities()));
  if (batch.frames > cfg.l_max)
    throw std::invalid_argument("sequence of " + std::to_string(batch.frames) + " frames exceeds the temporal table");
  ParameterSet& ps = model.params();
  const Index R = batch.rows();
  std::vector<Index> t_idx(static_cast<std::size_t>(R)), g_idx(t_idx.size()), e_idx(t_idx.size()), r_idx(t_idx.size());
  for (Index r = 0; r < R; ++r) {
    const Index e = r % batch.entities;
    const Index t = (r / batch.entities) % batch.frames;
    const auto i = static_cast<std::size_t>(r);
    t_idx[i] = t;
    e_idx[i] = e;
    g_idx[i] = data::Roster::group_of(e, cfg.per_team);
    r_idx[i] = batch.noise_target[i] ? 1 : 0;
  }
  Var h = linear(tape, ps, "embed.in", tape.constant(batch.coords));
  h = numeric::add_indexed_rows(h, tape.param(ps.at("embed.time")), t_idx);
  h = numeric::add_indexed_rows(h, tape.param(ps.at("embed.group")), g_idx);
  h = numeric::add_indexed_rows(h, tape.param(ps.at("embed.entity")), e_idx);
  h = numeric::add_indexed_rows(h, tape.param(ps.at("embed.role")), r_idx);
  if (!batch.steps.empty()) {
    if (cfg.head != HeadKind::noise) throw std::invalid_argument("diffusion steps given to an event model");
    Matrix steps(batch.samples, cfg.d);
    for (Index s = 0; s < batch.samples; ++s) steps.row(s) = step_embedding(batch.steps[static_cast<std::size_t>(s)], cfg.d);
    const Var cond = linear(tape, ps, "embed.step", tape.constant(std::move(steps)));
    std::vector<Index> s_idx(static_cast<std::size_t>(R));
    for (Index r = 0; r < R; ++r) s_idx[static_cast<std::size_t>(r)] = r / (batch.frames * batch.entities);
    h = h + numeric::gather_rows(cond, s_idx);
  }
  return h;
}

AttentionGroups spatial_groups(const TokenBatch& batch) {
  AttentionGroups g;
  g.members.reserve(static_cast<std::size_t>(batch.samples * batch.frames));
  for (Index st = 0; st < batch.samples * batch.frames; ++st) {
    std::vector<Index> m(static_cast<std::size_t>(batch.entities));
    for (Index e = 0; e < batch.entities; ++e) m[static_cast<std::size_t>(e)] = st * batch.entities + e;
    g.members.push_back(std::move(m));
  }
  return g;
}

AttentionGroups temporal_groups(const TokenBatch& batch) {
  AttentionGroups g;
  g.members.reserve(static_cast<std::size_t>(batch.samples * batch.entities));
  for (Index s = 0; s < batch.samples; ++s)
    for (Index e = 0; e < batch.entities; ++e) {
      std::vector<Index> m(static_cast<std::size_t>(batch.frames));
      for (Index t = 0; t < batch.frames; ++t)
        m[static_cast<std::size_t>(t)] = (s * batch.frames + t) * batch.entities + e;
      g.members.push_back(std::move(m));
    }
  return g;
}

Var spatial_attention(Tape& tape, Model& model, int layer, Var h, const TokenBatch& batch,
                      std::vector<Matrix>* weights) {
  h = attention_block(tape, model, layer_name(layer, "spatial"), h, batch, spatial_groups(batch), weights);
  if (model.config().mlp) h = mlp_block(tape, model, layer_name(layer, "spatial_mlp"), h);
  return h;
}

Var temporal_attention(Tape& tape, Model& model, int layer, Var h, const TokenBatch& batch,
                       std::vector<Matrix>* weights) {
  h = attention_block(tape, model, layer_name(layer, "temporal"), h, batch, temporal_groups(batch), weights);
  if (model.config().mlp) h = mlp_block(tape, model, layer_name(layer, "temporal_mlp"), h);
  return h;
}

Var encode(Tape& tape, Model& model, const TokenBatch& batch, std::vector<Matrix>* weights) {
  Var h = embed(tape, model, batch);
  for (int l = 0; l < model.config().layers; ++l) {
    h = spatial_attention(tape, model, l, h, batch, weights);
    h = temporal_attention(tape, model, l, h, batch, weights);
  }
  return h;
}

Var noise_head(Tape& tape, Model& model, Var h) {
  ParameterSet& ps = model.params();
  return linear(tape, ps, "head.noise", norm(tape, ps, "head.ln", h));
}

}  // namespace gentac::model
