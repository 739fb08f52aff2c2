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

#include "gentac/metrics/structure.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace gentac::metrics {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Vec2 centroid(std::span<const Vec2> pts) {
  Vec2 c = Vec2::Zero();
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

}  // namespace

std::array<double, kStructureCount> StructureVector::values() const {
  return {stretch_index, surface_area, team_width, team_length, frobenius_norm, centroid_displacement, kuramoto_order};
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(std::span<const Vec2> poly) {
  double twice = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

double hull_area(std::span<const Vec2> points) {
  const auto hull = convex_hull({points.begin(), points.end()});
  return hull.size() < 3 ? 0.0 : polygon_area(hull);
}

StructureVector structure(std::span<const Vec2> team, std::span<const Vec2> previous,
                          std::span<const Vec2> velocities) {
  if (team.empty()) throw std::invalid_argument("structure needs at least one visible player");
  StructureVector s;
  const Vec2 c = centroid(team);
  double min_x = INFINITY, max_x = -INFINITY, min_y = INFINITY, max_y = -INFINITY;
  for (const auto& p : team) {
    s.stretch_index += (p - c).norm();
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_y = std::min(min_y, p.y());
    max_y = std::max(max_y, p.y());
  }
  s.stretch_index /= static_cast<double>(team.size());
  s.team_length = max_x - min_x;
  s.team_width = max_y - min_y;

  double sq = 0;
  for (std::size_t i = 0; i < team.size(); ++i)
    for (std::size_t j = i + 1; j < team.size(); ++j) sq += (team[i] - team[j]).squaredNorm();
  s.frobenius_norm = std::sqrt(sq);

  s.surface_area = hull_area(team);
  s.degenerate_area = team.size() < 3 || s.surface_area == 0.0;

  if (previous.empty()) {
    s.no_previous = true;
  } else {
    s.centroid_displacement = (c - centroid(previous)).norm();
  }

  std::complex<double> phase_sum = 0;
  int moving = 0;
  for (const auto& v : velocities) {
    if (v.norm() < kKuramotoSpeedEps) continue;
    phase_sum += std::polar(1.0, std::atan2(v.y(), v.x()));
    ++moving;
  }
  if (moving == 0) {
    s.kuramoto_order = 1.0;
    s.degenerate_kuramoto = true;
  } else {
    s.kuramoto_order = std::min(1.0, std::abs(phase_sum) / moving);
  }
  return s;
}

std::vector<StructureVector> structure_series(const Segment& traj, const Segment& last_history,
                                              std::span<const Index> team_slots, const Segment& mask_source,
                                              double fps) {
  std::vector<StructureVector> out;
  for (Index t = 0; t < traj.frames; ++t) {
    std::vector<Vec2> cur, prev, vel;
    for (Index e : team_slots) {
      if (!mask_source.visible(t, e)) continue;
      cur.push_back(traj.at(t, e));
      const bool has_prev = t > 0 ? static_cast<bool>(mask_source.visible(t - 1, e))
                                  : last_history.frames > 0 && last_history.visible(0, e);
      if (has_prev) {
        const Vec2 p = t > 0 ? traj.at(t - 1, e) : last_history.at(0, e);
        prev.push_back(p);
        vel.push_back((cur.back() - p) * fps);
      }
    }
    if (cur.empty()) {
      out.emplace_back();
      out.back().no_previous = true;
      continue;
    }
    // Displacement only when every current player also has a previous
    // position, so the two centroids describe the same players.
    const bool complete = prev.size() == cur.size();
    out.push_back(structure(cur, complete ? std::span<const Vec2>(prev) : std::span<const Vec2>(), vel));
  }
  return out;
}

std::vector<HorizonStructure> structure_deviation(const std::vector<ClipForecast>& clips,
                                                  std::span<const double> horizons_s, double fps, int per_team) {
  std::vector<HorizonStructure> report;
  for (double h : horizons_s) {
    HorizonStructure row;
    row.seconds = h;
    row.frames = horizon_frames(h, fps);
    for (const auto& clip : clips) {
      if (row.frames < 1 || clip.truth.frames < row.frames || clip.samples.empty()) continue;
      std::array<std::vector<Index>, 2> teams;
      for (Index e : clip.entities) {
        const auto g = static_cast<std::size_t>(data::Roster::group_of(e, per_team));
        if (g < 2) teams[g].push_back(e);
      }
      const Segment truth = clip.truth.slice(0, row.frames);
      std::array<std::vector<StructureVector>, 2> truth_series;
      for (std::size_t g = 0; g < 2; ++g)
        if (!teams[g].empty())
          truth_series[g] =
              structure_series(truth, clip.last_history, teams[g], truth, fps);

      std::array<double, kStructureCount> mins;
      mins.fill(INFINITY);
      std::array<double, kStructureCount> sums{};
      bool any_team = false;
      for (const auto& sample : clip.samples) {
        const Segment pred = sample.slice(0, row.frames);
        std::array<double, kStructureCount> delta{};
        int team_count = 0;
        for (std::size_t g = 0; g < 2; ++g) {
          const auto& slots = teams[g];
          if (slots.empty()) continue;
          const auto ps = structure_series(pred, clip.last_history, slots, truth, fps);
          const auto& ts = truth_series[g];
          std::array<double, kStructureCount> acc{};
          for (std::size_t t = 0; t < ps.size(); ++t) {
            const auto a = ps[t].values(), b = ts[t].values();
            for (std::size_t m = 0; m < kStructureCount; ++m) acc[m] += std::abs(a[m] - b[m]);
          }
          for (std::size_t m = 0; m < kStructureCount; ++m) delta[m] += acc[m] / static_cast<double>(ps.size());
          ++team_count;
        }
        if (team_count == 0) continue;
        any_team = true;
        for (std::size_t m = 0; m < kStructureCount; ++m) {
          const double d = delta[m] / team_count;
          mins[m] = std::min(mins[m], d);
          sums[m] += d;
        }
      }
      if (!any_team) continue;
      for (std::size_t m = 0; m < kStructureCount; ++m) {
        row.min_delta[m] += mins[m];
        row.avg_delta[m] += sums[m] / static_cast<double>(clip.samples.size());
      }
      ++row.clips;
    }
    if (row.clips > 0)
      for (std::size_t m = 0; m < kStructureCount; ++m) {
        row.min_delta[m] /= static_cast<double>(row.clips);
        row.avg_delta[m] /= static_cast<double>(row.clips);
      }
    report.push_back(row);
  }
  return report;
}

}  // namespace gentac::metrics
