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

#include "gentac/data/clip.hpp"
#include "gentac/numeric/array.hpp"
#include "gentac/numeric/rng.hpp"

#include <algorithm>

namespace gentac::data {

using numeric::Index;
using numeric::Matrix;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Entity slot layout shared by every segment: `per_team` slots for team0,
/// `per_team` for team1, then the ball. Ids fill slots in byte order; unused
/// slots stay permanently invisible.
struct Roster {
  int per_team = 11;
  std::array<std::vector<std::string>, 2> ids;

  static Roster of(const TrajectoryClip& clip);
  Index entities() const { return 1 + 2 * per_team; }
  /// Slot of a player id, or -1.
  Index slot(int team, const std::string& id) const;
  Index ball() const { return 2 * per_team; }
  /// 0 team0, 1 team1, 2 ball.
  static int group_of(Index slot, int per_team) { return static_cast<int>(std::min<Index>(slot / per_team, 2)); }
};

/// Fixed-size block of normalized coordinates. Row t * entities + e of
/// `coords` holds entity e at frame t; missing entries are zero and the
/// visibility mask (frames x entities) says which rows carry data.
struct Segment {
  Index frames = 0;
  Index entities = 0;
  Matrix coords;
  Mask visible;

  Segment() = default;
  Segment(Index frames, Index entities);

  Index row(Index t, Index e) const { return t * entities + e; }
  Vec2 at(Index t, Index e) const { return coords.row(row(t, e)).transpose(); }
  void set(Index t, Index e, const Vec2& p);
  /// Frames [first, first + count).
  Segment slice(Index first, Index count) const;
  /// Frames of `a` followed by frames of `b`.
  static Segment concat(const Segment& a, const Segment& b);
};

Vec2 normalize(const Vec2& p, const PitchSpec& pitch);
Vec2 denormalize(const Vec2& p, const PitchSpec& pitch);

/// Normalizes frames [first, first + count) into roster slots. Throws
/// DataError for positions outside the pitch plus `slack`.
Segment to_segment(const TrajectoryClip& clip, const Roster& roster, Index first, Index count,
                   double slack = 0.5);

/// Writes a segment back as frames with indices first_index, first_index + 1, ...
std::vector<Frame> to_frames(const Segment& seg, const Roster& roster, const PitchSpec& pitch,
                             std::int64_t first_index);

struct Window {
  Segment history;
  Segment future;
};

Window window(const TrajectoryClip& clip, const Roster& roster, Index start, Index history_len,
              Index future_len);

/// floor((len - H - T) / stride) + 1, or 0 when the clip is too short.
Index count_windows(Index len, Index history_len, Index future_len, Index stride);

/// Draws one Bernoulli per axis and negates that coordinate for every row.
Segment flip_augment(const Segment& seg, double p_horizontal, double p_vertical, numeric::Rng& rng);
/// Deterministic variant used when several segments must share an outcome.
Segment flip(const Segment& seg, bool horizontal, bool vertical);

}  // namespace gentac::data
