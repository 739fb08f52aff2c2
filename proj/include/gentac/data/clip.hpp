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

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gentac::data {

using Vec2 = Eigen::Vector2d;
/// Absent means the entity was not tracked at that frame.
using Position = std::optional<Vec2>;
/// Player id -> position. std::map keeps ids in the canonical (byte-wise) order.
using TeamMap = std::map<std::string, Position>;

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Sport { soccer, basketball, american_football, ice_hockey };

std::string_view to_string(Sport s);
Sport sport_from_string(std::string_view s);
/// Regulation players per side: 11, 5, 11, 6.
int players_per_team(Sport s);

/// Playing surface in meters, origin at the center spot.
struct PitchSpec {
  double length = 105.0;
  double width = 68.0;

  static PitchSpec for_sport(Sport s);
  double area() const { return length * width; }
  double half_length() const { return 0.5 * length; }
  double half_width() const { return 0.5 * width; }
  /// Inside the surface extended by `slack` meters on every side.
  bool contains(const Vec2& p, double slack = 0.5) const;
};

/// Extra same-id detection kept by lenient parsing for duplicate resolution.
struct Detection {
  std::string id;
  Vec2 position;
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct Frame {
  std::int64_t index = 0;
  Position ball;
  std::array<TeamMap, 2> teams;
  std::array<std::vector<Detection>, 2> duplicates;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Optional conditioning tags carried next to a clip.
struct ClipMetadata {
  std::string id;
  std::string team;
  std::string league;
  std::string event_type;
  std::string event_subtype;

  friend bool operator==(const ClipMetadata&, const ClipMetadata&) = default;
};

struct TrajectoryClip {
  std::vector<Frame> frames;
  double fps = 25.0;
  Sport sport = Sport::soccer;
  int players_per_team = 11;
  ClipMetadata meta;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  PitchSpec pitch() const { return PitchSpec::for_sport(sport); }

  /// Sorted ids per team across every frame.
  std::array<std::vector<std::string>, 2> roster() const;

  /// Throws DataError on non-increasing indices, an oversized roster or
  /// positions outside the pitch plus slack.
  void validate(double slack = 0.5) const;

  friend bool operator==(const TrajectoryClip&, const TrajectoryClip&) = default;
};

}  // namespace gentac::data
