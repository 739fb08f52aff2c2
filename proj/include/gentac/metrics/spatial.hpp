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

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace gentac::metrics {

using data::Vec2;
using numeric::Index;
using numeric::Matrix;

/// Values over a regular cell grid covering the pitch. Row 0 is the y = -W/2
/// edge and column 0 the x = -L/2 edge; the attacking direction is +x.
struct EpvGrid {
  Matrix values;
  data::PitchSpec pitch;
  bool synthetic = false;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  double cell_width() const { return pitch.length / static_cast<double>(cols()); }
  double cell_height() const { return pitch.width / static_cast<double>(rows()); }
  Vec2 center(Index r, Index c) const;
  double total() const { return values.sum(); }
};

/// Text matrix with a "rows cols" header; rows are y cells, columns x cells.
EpvGrid parse_epv(std::string_view text, const data::PitchSpec& pitch = {});
EpvGrid load_epv(const std::filesystem::path& path, const data::PitchSpec& pitch = {});
std::string serialize_epv(const EpvGrid& grid);
/// Bilinear resample at cell centers.
EpvGrid resample(const EpvGrid& grid, Index rows, Index cols);
/// Resamples to `cell` meter cells (105 x 68 for 1 m on a standard pitch).
EpvGrid at_resolution(const EpvGrid& grid, double cell = 1.0);
/// Non-measured stand-in: exp(-distance to the +x goal / 20), scaled to [0, 1].
EpvGrid synthetic_epv(const data::PitchSpec& pitch = {}, double cell = 1.0);

enum class ControlRule { nearest, arrival };

/// Kinematic arrival model: the velocity component toward the cell is the
/// initial speed, the player accelerates at `accel` toward the cell up to
/// `max_speed`. The perpendicular component is ignored.
struct ArrivalModel {
  double accel = 3.0;      // m/s^2
  double max_speed = 8.0;  // m/s
  double time(const Vec2& from, const Vec2& velocity, const Vec2& to) const;
};

struct Player {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

/// Per cell: +1 attacker, -1 defender, 0 tie (within 1e-9 of each other).
/// `nearest` uses Euclidean distance, `arrival` the arrival model.
std::vector<int> control_map(std::span<const Player> attackers, std::span<const Player> defenders,
                             const EpvGrid& grid, ControlRule rule = ControlRule::nearest,
                             const ArrivalModel& model = {});

/// Share of total EPV in attacker-controlled cells.
double obet(std::span<const Player> attackers, std::span<const Player> defenders, const EpvGrid& epv,
            ControlRule rule = ControlRule::nearest);

/// sum_z (N_z^atk / N_z) (EPV_z / EPV_total) over `zones` equal strips along
/// x (depth) or y (width).
double depth_threat(std::span<const Player> attackers, std::span<const Player> defenders, const EpvGrid& epv,
                    int zones = 32);
double width_threat(std::span<const Player> attackers, std::span<const Player> defenders, const EpvGrid& epv,
                    int zones = 32);
/// Zone-threat from an explicit control map.
double zone_threat(const std::vector<int>& control, const EpvGrid& epv, int zones, bool along_x);

/// clip(100 (after - before) / pitch area, -1, 1).
double defensive_disruption(double area_before, double area_after, const data::PitchSpec& pitch);

struct DominantRegion {
  double defensive_area = 0;  // m^2
  double offensive_area = 0;
  double tie_area = 0;
  Index defensive_cells = 0, offensive_cells = 0, tie_cells = 0;
};

/// Cells a defender reaches strictly first under the arrival model. Ties go
/// to neither side. Grid of `cell` meter cells.
DominantRegion dominant_region(std::span<const Player> defenders, std::span<const Player> attackers,
                               const data::PitchSpec& pitch, double cell = 1.0, const ArrivalModel& model = {});

}  // namespace gentac::metrics
