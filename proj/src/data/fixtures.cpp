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

#include "gentac/data/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace gentac::data {

namespace {

std::string player_id(int team, int k) { return "P" + std::to_string(team * 50 + k + 1); }

Vec2 uniform_in(numeric::Rng& rng, double hx, double hy) {
  return {(2.0 * rng.uniform() - 1.0) * hx, (2.0 * rng.uniform() - 1.0) * hy};
}

Vec2 clamp_to(const PitchSpec& p, const Vec2& v) {
  return {std::clamp(v.x(), -p.half_length(), p.half_length()), std::clamp(v.y(), -p.half_width(), p.half_width())};
}

TrajectoryClip empty_clip(const MotionParams& params) {
  TrajectoryClip c;
  c.fps = params.fps;
  c.players_per_team = params.per_team;
  c.frames.resize(static_cast<std::size_t>(params.frames));
  for (int f = 0; f < params.frames; ++f) c.frames[static_cast<std::size_t>(f)].index = f;
  return c;
}

/// Calls `fn(frame, team, id)` for every entity slot; team -1 is the ball.
template <typename Fn>
void for_entities(int per_team, Fn fn) {
  for (int t = 0; t < 2; ++t)
    for (int k = 0; k < per_team; ++k) fn(t, player_id(t, k));
  fn(-1, std::string());
}

void put(Frame& f, int team, const std::string& id, const Vec2& p) {
  if (team < 0) f.ball = p;
  else f.teams[static_cast<std::size_t>(team)][id] = p;
}

}  // namespace

TrajectoryClip constant_velocity_clip(numeric::Rng& rng, const MotionParams& params) {
  TrajectoryClip c = empty_clip(params);
  const PitchSpec pitch = c.pitch();
  const double dt = 1.0 / params.fps;
  const double duration = params.frames * dt;
  for_entities(params.per_team, [&](int team, const std::string& id) {
    // Pick a start that keeps the worst-case path inside the pitch.
    const double reach = (params.speed_max + 3.0 * params.sigma * std::sqrt(params.frames)) * duration;
    const double hx = std::max(1.0, pitch.half_length() - reach), hy = std::max(1.0, pitch.half_width() - reach);
    Vec2 x = uniform_in(rng, hx, hy);
    const double angle = 2.0 * M_PI * rng.uniform();
    const double speed = params.speed_min + (params.speed_max - params.speed_min) * rng.uniform();
    Vec2 v(speed * std::cos(angle), speed * std::sin(angle));
    for (int f = 0; f < params.frames; ++f) {
      if (f > 0) {
        v += params.sigma * Vec2(rng.normal(), rng.normal());
        x += v * dt;
      }
      put(c.frames[static_cast<std::size_t>(f)], team, id, clamp_to(pitch, x));
    }
  });
  return c;
}

TrajectoryClip circular_motion_clip(numeric::Rng& rng, const MotionParams& params) {
  TrajectoryClip c = empty_clip(params);
  const PitchSpec pitch = c.pitch();
  for_entities(params.per_team, [&](int team, const std::string& id) {
    const double radius = 2.0 + 6.0 * rng.uniform();
    const Vec2 center = uniform_in(rng, pitch.half_length() - radius - 1.0, pitch.half_width() - radius - 1.0);
    const double omega = (rng.bernoulli(0.5) ? 1.0 : -1.0) * (0.5 + rng.uniform());
    const double phase = 2.0 * M_PI * rng.uniform();
    for (int f = 0; f < params.frames; ++f) {
      const double a = phase + omega * f / params.fps;
      put(c.frames[static_cast<std::size_t>(f)], team, id, center + radius * Vec2(std::cos(a), std::sin(a)));
    }
  });
  return c;
}

TrajectoryClip style_clip(numeric::Rng& rng, const std::string& style, const MotionParams& params) {
  if (style != "tight" && style != "spread") throw std::invalid_argument("style must be tight or spread");
  const double spread = style == "tight" ? 4.0 : 14.0;
  TrajectoryClip c = empty_clip(params);
  c.meta.league = style;
  c.meta.team = style + "_fc";
  const PitchSpec pitch = c.pitch();
  const double dt = 1.0 / params.fps;
  for (int team = 0; team < 2; ++team) {
    Vec2 centroid = uniform_in(rng, 20.0, 10.0);
    const double angle = 2.0 * M_PI * rng.uniform();
    Vec2 v = 2.0 * Vec2(std::cos(angle), std::sin(angle));
    std::vector<Vec2> offsets;
    for (int k = 0; k < params.per_team; ++k) offsets.push_back(spread * Vec2(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0));
    for (int f = 0; f < params.frames; ++f) {
      if (f > 0) {
        v += 0.2 * Vec2(rng.normal(), rng.normal());
        centroid += v * dt;
        // Formation breathes slowly around its style scale.
        for (auto& o : offsets) o += 0.05 * Vec2(rng.normal(), rng.normal()) - 0.02 * (o.norm() - spread) * o.normalized();
      }
      for (int k = 0; k < params.per_team; ++k)
        put(c.frames[static_cast<std::size_t>(f)], team, player_id(team, k), clamp_to(pitch, centroid + offsets[static_cast<std::size_t>(k)]));
    }
  }
  Vec2 ball = uniform_in(rng, 20.0, 10.0);
  const Vec2 bv = 3.0 * Vec2(rng.normal(), rng.normal()).normalized();
  for (int f = 0; f < params.frames; ++f) {
    c.frames[static_cast<std::size_t>(f)].ball = clamp_to(pitch, ball);
    ball += bv * dt;
  }
  return c;
}

TrajectoryClip event_class_clip(numeric::Rng& rng, int cls, const MotionParams& params) {
  if (cls < 0 || cls > 2) throw std::invalid_argument("event fixture class must be 0, 1 or 2");
  TrajectoryClip c = empty_clip(params);
  c.meta.event_subtype = kEventFixtureSubtypes[cls];
  c.meta.event_type = cls == 0 ? "build" : cls == 1 ? "threat" : "set_piece";
  const PitchSpec pitch = c.pitch();
  const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
  Vec2 target;
  if (cls == 1) target = Vec2(side * (pitch.half_length() - 8.0 * rng.uniform() - 2.0), 15.0 * (2.0 * rng.uniform() - 1.0));
  if (cls == 2) target = Vec2(side * (pitch.half_length() - 1.0), (rng.bernoulli(0.5) ? 1.0 : -1.0) * (pitch.half_width() - 1.0));
  for_entities(params.per_team, [&](int team, const std::string& id) {
    Vec2 start = uniform_in(rng, 40.0, 25.0);
    Vec2 goal = start;
    if (cls == 1) goal = team < 0 ? target : target + 4.0 * Vec2(rng.normal(), rng.normal());
    if (cls == 2) goal = target + 3.0 * Vec2(-side * rng.uniform(), rng.normal());
    if (cls == 2 && team < 0) start = goal;
    for (int f = 0; f < params.frames; ++f) {
      const double w = params.frames > 1 ? static_cast<double>(f) / (params.frames - 1) : 1.0;
      const Vec2 jitter = 0.3 * Vec2(rng.normal(), rng.normal());
      const Vec2 p = cls == 0 ? Vec2(start + jitter) : Vec2((1.0 - w) * start + w * goal + jitter);
      put(c.frames[static_cast<std::size_t>(f)], team, id, clamp_to(pitch, p));
    }
  });
  return c;
}

std::vector<Position> extrapolate_constant_velocity(const Frame& previous, const Frame& last, int steps_ahead,
                                                    const std::vector<std::pair<int, std::string>>& entities) {
  std::vector<Position> out;
  for (const auto& [team, id] : entities) {
    auto get = [&](const Frame& f) -> Position {
      if (team < 0) return f.ball;
      const auto& m = f.teams[static_cast<std::size_t>(team)];
      auto it = m.find(id);
      return it == m.end() ? std::nullopt : it->second;
    };
    const Position a = get(previous), b = get(last);
    if (a && b) out.push_back(Vec2(*b + steps_ahead * (*b - *a)));
    else out.push_back(b);
  }
  return out;
}

}  // namespace gentac::data
