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

#include "gentac/metrics/geometric.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace gentac::metrics {

inline constexpr int kStructureCount = 7;
/// Column order of the structure tables.
inline constexpr std::array<std::string_view, kStructureCount> kStructureNames = {
    "stretch_index", "surface_area", "team_width", "team_length", "frobenius_norm", "centroid_displacement",
    "kuramoto_order"};

struct StructureVector {
  double stretch_index = 0;          // m
  double surface_area = 0;           // m^2
  double team_width = 0;             // m, extent along y
  double team_length = 0;            // m, extent along x
  double frobenius_norm = 0;         // m
  double centroid_displacement = 0;  // m
  double kuramoto_order = 1;         // [0, 1]
  /// Fewer than three players or collinear: area is 0.
  bool degenerate_area = false;
  /// No player above the speed threshold: order reported as 1.
  bool degenerate_kuramoto = false;
  /// No previous frame: displacement reported as 0.
  bool no_previous = false;

  std::array<double, kStructureCount> values() const;
};

inline constexpr double kKuramotoSpeedEps = 0.1;  // m/s

/// Convex hull (counter-clockwise, no collinear points) by monotone chain.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);
/// Shoelace area of a simple polygon.
double polygon_area(std::span<const Vec2> polygon);
double hull_area(std::span<const Vec2> points);

/// Seven team-structure metrics of one frame. `previous` (may be empty) gives
/// the same players one frame earlier; `velocities` (may be empty) gives
/// per-player velocity for the Kuramoto order.
StructureVector structure(std::span<const Vec2> team, std::span<const Vec2> previous,
                          std::span<const Vec2> velocities);

/// |m(pred) - m(truth)| per metric, time-averaged per horizon, min and mean
/// over K per clip, then averaged over clips.
struct HorizonStructure {
  double seconds = 0;
  Index frames = 0;
  Index clips = 0;
  std::array<double, kStructureCount> min_delta{};
  std::array<double, kStructureCount> avg_delta{};
};

/// Structure is computed per team among the scored entities (the ball is
/// excluded) and team deltas are averaged. Players invisible in the truth at
/// a frame are dropped from both sides of that frame.
std::vector<HorizonStructure> structure_deviation(const std::vector<ClipForecast>& clips,
                                                  std::span<const double> horizons_s, double fps, int per_team);

/// Per-frame structure of the scored players of one team (0 or 1) over a
/// trajectory; `last_history` supplies frame -1 when present.
std::vector<StructureVector> structure_series(const Segment& traj, const Segment& last_history,
                                              std::span<const Index> team_slots, const Segment& mask_source,
                                              double fps);

}  // namespace gentac::metrics
