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
#include "gentac/numeric/rng.hpp"

#include <string>
#include <vector>

namespace gentac::data {

struct MotionParams {
  double fps = 10.0;
  int frames = 30;
  int per_team = 3;
  /// Initial speed drawn uniformly from [speed_min, speed_max] m/s.
  double speed_min = 6.0;
  double speed_max = 9.0;
  /// Velocity random walk: v += sigma * N(0, 1) per frame (m/s).
  double sigma = 0.8;
};

/// Every entity (players and ball) moves along a noisy straight line:
/// v_{t+1} = v_t + sigma xi, x_{t+1} = x_t + v_{t+1} / fps. Start points keep
/// the whole clip inside the pitch.
TrajectoryClip constant_velocity_clip(numeric::Rng& rng, const MotionParams& params);

/// Players circle their own centers at random radii and angular speeds.
TrajectoryClip circular_motion_clip(numeric::Rng& rng, const MotionParams& params);

/// Formation drifting as a block; "tight" keeps players within about 4 m of
/// the team centroid, "spread" within about 14 m. Tagged league = style.
TrajectoryClip style_clip(numeric::Rng& rng, const std::string& style, const MotionParams& params);

/// Three separable event classes:
///   0 "build": static spread formation, label build;
///   1 "shot_saved": all players converge on a ball inside the penalty box;
///   2 "corner": every player crowds the far corner.
TrajectoryClip event_class_clip(numeric::Rng& rng, int cls, const MotionParams& params);
inline constexpr const char* kEventFixtureSubtypes[3] = {"build", "shot_saved", "corner"};

/// Constant-velocity extrapolation from the last finite difference of each
/// entity's history (the mean of the random-walk process).
std::vector<Position> extrapolate_constant_velocity(const Frame& previous, const Frame& last, int steps_ahead,
                                                    const std::vector<std::pair<int, std::string>>& entities);

}  // namespace gentac::data
