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

#include "gentac/data/segment.hpp"
#include "gentac/numeric/tape.hpp"

#include <cstdint>
#include <vector>

namespace gentac::model {

using data::Mask;
using data::Segment;
using numeric::Index;
using numeric::Matrix;
using numeric::ParameterSet;
using numeric::Tape;
using numeric::Var;

enum class HeadKind { noise, event };

struct BackboneConfig {
  int d = 256;
  int layers = 4;
  int heads = 8;
  int per_team = 11;
  /// Temporal table length; also the fixed event-clip length.
  int l_max = 250;
  /// Optional feed-forward sublayer after each attention (off by default).
  bool mlp = false;
  int mlp_ratio = 4;
  HeadKind head = HeadKind::noise;

  Index entities() const { return 1 + 2 * per_team; }
  /// d=32, M=2, 4 heads.
  static BackboneConfig desk(int per_team = 11);
  void validate() const;
  friend bool operator==(const BackboneConfig&, const BackboneConfig&) = default;
};

enum class Task { forecast_joint, forecast_single, event };

struct GridOptions {
  /// Single-team mode only: predict the ball too instead of conditioning on it.
  bool ball_is_target = false;
  /// Event mode only: fixed clip length.
  int l_max = 250;
};

/// One sample's tokens. Rows are t * entities + e. `visible` covers history
/// and future; `noise_target` marks the slots the diffusion model writes.
struct TokenGrid {
  Index frames = 0;
  Index entities = 0;
  Index history_frames = 0;
  Matrix coords;
  Mask visible;
  Mask noise_target;

  Index noise_count() const { return noise_target.count(); }
};

/// Forecast tasks concatenate history and future; noise-target slots are the
/// future slots of the predicted side(s) that are visible in `future`. Event
/// grids keep the last l_max frames of `history`, pad the rest and mask it.
TokenGrid build_token_grid(const Segment& history, const Segment& future, Task task, int target_side = 0,
                           const GridOptions& options = {});

/// Same-shape grids stacked along a leading sample axis: row (b * L + t) * E + e.
struct TokenBatch {
  Index samples = 0;
  Index frames = 0;
  Index entities = 0;
  Matrix coords;
  std::vector<std::uint8_t> visible;
  std::vector<std::uint8_t> noise_target;
  /// Diffusion step per sample; empty for event batches.
  std::vector<int> steps;

  Index rows() const { return samples * frames * entities; }
  Matrix noise_weight() const;
};

TokenBatch stack(const std::vector<const TokenGrid*>& grids, std::vector<int> steps = {});
TokenBatch stack(const TokenGrid& grid, int step = -1);

class Model {
 public:
  Model() = default;
  explicit Model(const BackboneConfig& config) : config_(config) {}

  /// Allocates and initializes every parameter from `seed`.
  static Model create(const BackboneConfig& config, std::uint64_t seed);

  const BackboneConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  Model clone() const;

 private:
  BackboneConfig config_;
  ParameterSet params_;
};

/// Sinusoidal embedding of a diffusion step, 1 x d.
Matrix step_embedding(int step, int d);

/// h[t,n] = proj(coords) + temporal[t] + group(n) + entity[n] + role, plus the
/// step embedding for forecast batches.
Var embed(Tape& tape, Model& model, const TokenBatch& batch);
Var spatial_attention(Tape& tape, Model& model, int layer, Var h, const TokenBatch& batch,
                      std::vector<Matrix>* weights = nullptr);
Var temporal_attention(Tape& tape, Model& model, int layer, Var h, const TokenBatch& batch,
                       std::vector<Matrix>* weights = nullptr);
/// embed followed by M spatial-then-temporal layers. `weights`, when given,
/// receives every attention weight matrix in evaluation order.
Var encode(Tape& tape, Model& model, const TokenBatch& batch, std::vector<Matrix>* weights = nullptr);

/// Final norm and linear map to a 2-vector per token.
Var noise_head(Tape& tape, Model& model, Var h);

numeric::AttentionGroups spatial_groups(const TokenBatch& batch);
numeric::AttentionGroups temporal_groups(const TokenBatch& batch);

}  // namespace gentac::model
