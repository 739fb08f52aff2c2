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

#include "gentac/data/segment.hpp"

#include <algorithm>

namespace gentac::data {

Roster Roster::of(const TrajectoryClip& clip) {
  Roster r;
  r.per_team = clip.players_per_team;
  r.ids = clip.roster();
  for (const auto& ids : r.ids)
    if (static_cast<int>(ids.size()) > r.per_team)
      throw DataError("roster of " + std::to_string(ids.size()) + " exceeds " + std::to_string(r.per_team) +
                      " players per team");
  return r;
}

Index Roster::slot(int team, const std::string& id) const {
  const auto& v = ids[static_cast<std::size_t>(team)];
  auto it = std::lower_bound(v.begin(), v.end(), id);
  if (it == v.end() || *it != id) return -1;
  return team * per_team + (it - v.begin());
}

Segment::Segment(Index frames_, Index entities_)
    : frames(frames_), entities(entities_), coords(Matrix::Zero(frames_ * entities_, 2)),
      visible(Mask::Constant(frames_, entities_, false)) {}

void Segment::set(Index t, Index e, const Vec2& p) {
  coords.row(row(t, e)) = p.transpose();
  visible(t, e) = true;
}

Segment Segment::slice(Index first, Index count) const {
  if (first < 0 || count < 0 || first + count > frames) throw DataError("segment slice out of range");
  Segment s(count, entities);
  s.coords = coords.middleRows(first * entities, count * entities);
  s.visible = visible.middleRows(first, count);
  return s;
}

Segment Segment::concat(const Segment& a, const Segment& b) {
  if (a.entities != b.entities) throw DataError("segment entity counts differ");
  Segment s(a.frames + b.frames, a.entities);
  s.coords << a.coords, b.coords;
  s.visible << a.visible, b.visible;
  return s;
}

Vec2 normalize(const Vec2& p, const PitchSpec& pitch) {
  return {2.0 * p.x() / pitch.length, 2.0 * p.y() / pitch.width};
}

Vec2 denormalize(const Vec2& p, const PitchSpec& pitch) {
  return {0.5 * p.x() * pitch.length, 0.5 * p.y() * pitch.width};
}

Segment to_segment(const TrajectoryClip& clip, const Roster& roster, Index first, Index count, double slack) {
  if (first < 0 || count < 0 || first + count > static_cast<Index>(clip.frames.size()))
    throw DataError("insufficient frames: need " + std::to_string(first + count) + ", clip has " +
                    std::to_string(clip.frames.size()));
  const PitchSpec pitch = clip.pitch();
  Segment seg(count, roster.entities());
  auto put = [&](Index t, Index e, const Position& p, std::int64_t frame) {
    if (!p) return;
    if (!pitch.contains(*p, slack))
      throw DataError("position out of bounds at frame " + std::to_string(frame));
    seg.set(t, e, normalize(*p, pitch));
  };
  for (Index t = 0; t < count; ++t) {
    const Frame& f = clip.frames[static_cast<std::size_t>(first + t)];
    put(t, roster.ball(), f.ball, f.index);
    for (int team = 0; team < 2; ++team)
      for (const auto& [id, p] : f.teams[static_cast<std::size_t>(team)]) {
        const Index e = roster.slot(team, id);
        if (e < 0) throw DataError("player " + id + " not in roster");
        put(t, e, p, f.index);
      }
  }
  return seg;
}

std::vector<Frame> to_frames(const Segment& seg, const Roster& roster, const PitchSpec& pitch,
                             std::int64_t first_index) {
  std::vector<Frame> frames(static_cast<std::size_t>(seg.frames));
  for (Index t = 0; t < seg.frames; ++t) {
    Frame& f = frames[static_cast<std::size_t>(t)];
    f.index = first_index + t;
    const Index b = roster.ball();
    if (seg.visible(t, b)) f.ball = denormalize(seg.at(t, b), pitch);
    for (int team = 0; team < 2; ++team) {
      const auto& ids = roster.ids[static_cast<std::size_t>(team)];
      for (std::size_t k = 0; k < ids.size(); ++k) {
        const Index e = team * roster.per_team + static_cast<Index>(k);
        Position p;
        if (seg.visible(t, e)) p = denormalize(seg.at(t, e), pitch);
        f.teams[static_cast<std::size_t>(team)][ids[k]] = p;
      }
    }
  }
  return frames;
}

Window window(const TrajectoryClip& clip, const Roster& roster, Index start, Index history_len, Index future_len) {
  if (start < 0 || history_len < 0 || future_len < 0 ||
      start + history_len + future_len > static_cast<Index>(clip.frames.size()))
    throw DataError("insufficient frames for window at " + std::to_string(start));
  return {to_segment(clip, roster, start, history_len), to_segment(clip, roster, start + history_len, future_len)};
}

Index count_windows(Index len, Index history_len, Index future_len, Index stride) {
  if (stride <= 0) throw DataError("stride must be positive");
  const Index room = len - history_len - future_len;
  return room < 0 ? 0 : room / stride + 1;
}

Segment flip(const Segment& seg, bool horizontal, bool vertical) {
  Segment out = seg;
  if (horizontal) out.coords.col(0) *= -1.0;
  if (vertical) out.coords.col(1) *= -1.0;
  out.coords = (out.coords.array() == 0.0).select(0.0, out.coords);  // no -0
  return out;
}

Segment flip_augment(const Segment& seg, double p_horizontal, double p_vertical, numeric::Rng& rng) {
  const bool h = rng.bernoulli(p_horizontal);
  const bool v = rng.bernoulli(p_vertical);
  return flip(seg, h, v);
}

}  // namespace gentac::data
