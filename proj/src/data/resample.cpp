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

#include "gentac/data/resample.hpp"

#include <cmath>
#include <set>

namespace gentac::data {

namespace {

Position lerp(const Position& a, const Position& b, double w) {
  if (!a || !b) return std::nullopt;
  return Vec2((1.0 - w) * *a + w * *b);
}

Position lookup(const TeamMap& team, const std::string& id) {
  auto it = team.find(id);
  return it == team.end() ? std::nullopt : it->second;
}

}  // namespace

TrajectoryClip resample(const TrajectoryClip& clip, double target_fps) {
  if (!(target_fps > 0.0)) throw DataError("target fps must be positive");
  if (clip.frames.size() < 2) throw DataError("resampling needs at least two frames");

  TrajectoryClip out = clip;
  out.fps = target_fps;
  out.frames.clear();

  const std::int64_t first = clip.frames.front().index;
  auto time_of = [&](std::size_t i) { return static_cast<double>(clip.frames[i].index - first) / clip.fps; };
  const double span = time_of(clip.frames.size() - 1);
  const double eps = 1e-9;
  const auto count = static_cast<std::int64_t>(std::floor(span * target_fps + eps)) + 1;
  const auto first_out = static_cast<std::int64_t>(std::llround(static_cast<double>(first) * target_fps / clip.fps));

  std::size_t i = 0;
  for (std::int64_t k = 0; k < count; ++k) {
    const double tau = std::min(static_cast<double>(k) / target_fps, span);
    while (i + 1 < clip.frames.size() && time_of(i + 1) <= tau + eps) ++i;
    Frame f;
    f.index = first_out + k;
    const Frame& a = clip.frames[i];
    if (std::abs(time_of(i) - tau) <= eps || i + 1 == clip.frames.size()) {
      f.ball = a.ball;
      f.teams = a.teams;
      f.duplicates = a.duplicates;
    } else {
      const Frame& b = clip.frames[i + 1];
      const double w = (tau - time_of(i)) / (time_of(i + 1) - time_of(i));
      f.ball = lerp(a.ball, b.ball, w);
      for (std::size_t t = 0; t < 2; ++t) {
        std::set<std::string> ids;
        for (const auto& [id, p] : a.teams[t]) ids.insert(id);
        for (const auto& [id, p] : b.teams[t]) ids.insert(id);
        for (const auto& id : ids) f.teams[t][id] = lerp(lookup(a.teams[t], id), lookup(b.teams[t], id), w);
      }
    }
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace gentac::data
