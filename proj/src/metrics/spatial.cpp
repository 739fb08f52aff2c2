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

#include "gentac/metrics/spatial.hpp"

#include "gentac/data/clip_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gentac::metrics {

namespace {

constexpr double kTie = 1e-9;

Index cells_along(double extent, double cell) {
  const auto n = static_cast<Index>(std::llround(extent / cell));
  if (n < 1) throw std::invalid_argument("cell size larger than the pitch");
  return n;
}

EpvGrid blank_grid(const data::PitchSpec& pitch, double cell) {
  EpvGrid g;
  g.pitch = pitch;
  g.values = Matrix::Zero(cells_along(pitch.width, cell), cells_along(pitch.length, cell));
  return g;
}

double best_time(std::span<const Player> players, const Vec2& cell, ControlRule rule, const ArrivalModel& model) {
  double best = INFINITY;
  for (const auto& p : players)
    best = std::min(best, rule == ControlRule::nearest ? (cell - p.position).norm()
                                                       : model.time(p.position, p.velocity, cell));
  return best;
}

}  // namespace

Vec2 EpvGrid::center(Index r, Index c) const {
  return {-pitch.half_length() + (static_cast<double>(c) + 0.5) * cell_width(),
          -pitch.half_width() + (static_cast<double>(r) + 0.5) * cell_height()};
}

EpvGrid parse_epv(std::string_view text, const data::PitchSpec& pitch) {
  std::istringstream in{std::string(text)};
  Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) throw data::DataError("EPV grid needs a \"rows cols\" header");
  EpvGrid g;
  g.pitch = pitch;
  g.values.resize(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      double v = 0;
      if (!(in >> v)) throw data::DataError("EPV grid has fewer values than its header says");
      if (!std::isfinite(v) || v < 0) throw data::DataError("EPV values must be finite and non-negative");
      g.values(r, c) = v;
    }
  std::string extra;
  if (in >> extra) throw data::DataError("EPV grid has more values than its header says");
  return g;
}

EpvGrid load_epv(const std::filesystem::path& path, const data::PitchSpec& pitch) {
  return parse_epv(data::read_text(path), pitch);
}

std::string serialize_epv(const EpvGrid& grid) {
  std::ostringstream out;
  out.precision(17);
  out << grid.rows() << ' ' << grid.cols() << '\n';
  for (Index r = 0; r < grid.rows(); ++r) {
    for (Index c = 0; c < grid.cols(); ++c) out << (c ? " " : "") << grid.values(r, c);
    out << '\n';
  }
  return out.str();
}

EpvGrid resample(const EpvGrid& grid, Index rows, Index cols) {
  EpvGrid out;
  out.pitch = grid.pitch;
  out.synthetic = grid.synthetic;
  out.values.resize(rows, cols);
  // Source coordinate of a target cell center, in source cell units,
  // clamped to the outermost source centers.
  auto source = [](Index i, Index n_out, Index n_in) {
    const double u = (static_cast<double>(i) + 0.5) * static_cast<double>(n_in) / static_cast<double>(n_out) - 0.5;
    return std::clamp(u, 0.0, static_cast<double>(n_in - 1));
  };
  for (Index r = 0; r < rows; ++r) {
    const double v = source(r, rows, grid.rows());
    const Index r0 = static_cast<Index>(std::floor(v));
    const Index r1 = std::min(r0 + 1, grid.rows() - 1);
    const double fr = v - static_cast<double>(r0);
    for (Index c = 0; c < cols; ++c) {
      const double u = source(c, cols, grid.cols());
      const Index c0 = static_cast<Index>(std::floor(u));
      const Index c1 = std::min(c0 + 1, grid.cols() - 1);
      const double fc = u - static_cast<double>(c0);
      out.values(r, c) = (1 - fr) * ((1 - fc) * grid.values(r0, c0) + fc * grid.values(r0, c1)) +
                         fr * ((1 - fc) * grid.values(r1, c0) + fc * grid.values(r1, c1));
    }
  }
  return out;
}

EpvGrid at_resolution(const EpvGrid& grid, double cell) {
  return resample(grid, cells_along(grid.pitch.width, cell), cells_along(grid.pitch.length, cell));
}

EpvGrid synthetic_epv(const data::PitchSpec& pitch, double cell) {
  EpvGrid g = blank_grid(pitch, cell);
  g.synthetic = true;
  const Vec2 goal(pitch.half_length(), 0.0);
  for (Index r = 0; r < g.rows(); ++r)
    for (Index c = 0; c < g.cols(); ++c) g.values(r, c) = std::exp(-(g.center(r, c) - goal).norm() / 20.0);
  g.values /= g.values.maxCoeff();
  return g;
}

double ArrivalModel::time(const Vec2& from, const Vec2& velocity, const Vec2& to) const {
  const Vec2 d = to - from;
  const double dist = d.norm();
  if (dist == 0.0) return 0.0;
  const double u = std::min(velocity.dot(d / dist), max_speed);
  // Accelerate from u (possibly negative) until max_speed, then cruise.
  const double t_cap = (max_speed - u) / accel;
  const double d_cap = u * t_cap + 0.5 * accel * t_cap * t_cap;
  if (dist <= d_cap) return (-u + std::sqrt(u * u + 2.0 * accel * dist)) / accel;
  return t_cap + (dist - d_cap) / max_speed;
}

std::vector<int> control_map(std::span<const Player> attackers, std::span<const Player> defenders,
                             const EpvGrid& grid, ControlRule rule, const ArrivalModel& model) {
  std::vector<int> out(static_cast<std::size_t>(grid.rows() * grid.cols()), 0);
  for (Index r = 0; r < grid.rows(); ++r)
    for (Index c = 0; c < grid.cols(); ++c) {
      const Vec2 p = grid.center(r, c);
      const double a = best_time(attackers, p, rule, model), d = best_time(defenders, p, rule, model);
      int& cell = out[static_cast<std::size_t>(r * grid.cols() + c)];
      if (std::abs(a - d) <= kTie) cell = 0;
      else cell = a < d ? 1 : -1;
    }
  return out;
}

double obet(std::span<const Player> attackers, std::span<const Player> defenders, const EpvGrid& epv,
            ControlRule rule) {
  const auto control = control_map(attackers, defenders, epv, rule);
  // One sweep for both sums, so full control gives exactly 1.
  double owned = 0, total = 0;
  for (Index r = 0; r < epv.rows(); ++r)
    for (Index c = 0; c < epv.cols(); ++c) {
      total += epv.values(r, c);
      if (control[static_cast<std::size_t>(r * epv.cols() + c)] > 0) owned += epv.values(r, c);
    }
  if (!(total > 0)) throw std::invalid_argument("EPV grid has zero total");
  return owned / total;
}

double zone_threat(const std::vector<int>& control, const EpvGrid& epv, int zones, bool along_x) {
  if (zones < 1) throw std::invalid_argument("zone count must be positive");
  const double total = epv.total();
  if (!(total > 0)) throw std::invalid_argument("EPV grid has zero total");
  std::vector<double> points(static_cast<std::size_t>(zones)), owned(points), value(points);
  for (Index r = 0; r < epv.rows(); ++r)
    for (Index c = 0; c < epv.cols(); ++c) {
      const Vec2 p = epv.center(r, c);
      const double frac = along_x ? (p.x() + epv.pitch.half_length()) / epv.pitch.length
                                  : (p.y() + epv.pitch.half_width()) / epv.pitch.width;
      const auto z = static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(frac * zones)), 0, zones - 1));
      points[z] += 1;
      if (control[static_cast<std::size_t>(r * epv.cols() + c)] > 0) owned[z] += 1;
      value[z] += epv.values(r, c);
    }
  double sum = 0;
  for (std::size_t z = 0; z < points.size(); ++z)
    if (points[z] > 0) sum += owned[z] / points[z] * value[z] / total;
  return sum;
}

double depth_threat(std::span<const Player> attackers, std::span<const Player> defenders, const EpvGrid& epv,
                    int zones) {
  return zone_threat(control_map(attackers, defenders, epv), epv, zones, true);
}

double width_threat(std::span<const Player> attackers, std::span<const Player> defenders, const EpvGrid& epv,
                    int zones) {
  return zone_threat(control_map(attackers, defenders, epv), epv, zones, false);
}

double defensive_disruption(double area_before, double area_after, const data::PitchSpec& pitch) {
  if (area_before < 0 || area_after < 0) throw std::invalid_argument("areas must be non-negative");
  return std::clamp(100.0 * (area_after - area_before) / pitch.area(), -1.0, 1.0);
}

DominantRegion dominant_region(std::span<const Player> defenders, std::span<const Player> attackers,
                               const data::PitchSpec& pitch, double cell, const ArrivalModel& model) {
  if (defenders.empty() || attackers.empty()) throw std::invalid_argument("dominant_region needs both sides");
  const EpvGrid grid = blank_grid(pitch, cell);
  const auto control = control_map(attackers, defenders, grid, ControlRule::arrival, model);
  DominantRegion out;
  for (int v : control) {
    if (v < 0) ++out.defensive_cells;
    else if (v > 0) ++out.offensive_cells;
    else ++out.tie_cells;
  }
  const double area = grid.cell_width() * grid.cell_height();
  out.defensive_area = static_cast<double>(out.defensive_cells) * area;
  out.offensive_area = static_cast<double>(out.offensive_cells) * area;
  out.tie_area = static_cast<double>(out.tie_cells) * area;
  return out;
}

}  // namespace gentac::metrics
