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

#include "gentac/data/segment.hpp"

#include <span>
#include <vector>

namespace gentac::metrics {

using data::Index;
using data::Segment;
using data::Vec2;

/// Converts a normalized segment to meters.
Segment to_meters(const Segment& normalized, const data::PitchSpec& pitch);

/// Per-entity mean Euclidean error over the frames where the truth is
/// visible, averaged over `entities`. Entities with no visible truth frame
/// are skipped; returns 0 when none remain. Inputs in meters.
double ade(const Segment& pred, const Segment& truth, std::span<const Index> entities);
/// Error at the last frame, averaged over entities visible there.
double fde(const Segment& pred, const Segment& truth, std::span<const Index> entities);

/// K sampled futures of one clip with its ground truth (meters).
struct ClipForecast {
  std::vector<Segment> samples;
  Segment truth;
  /// Slots scored (the prediction targets).
  std::vector<Index> entities;
  /// Last observed frame before the future, used for the first-frame
  /// velocity and centroid displacement. Frames = 1 or 0.
  Segment last_history;
};

struct HorizonGeometry {
  double seconds = 0;
  Index frames = 0;
  Index clips = 0;
  double min_ade = 0, avg_ade = 0, min_fde = 0, avg_fde = 0;
};

struct GeometricReport {
  std::vector<HorizonGeometry> horizons;
};

/// Per clip min and mean over K of ADE/FDE on each horizon prefix, then
/// averaged over clips. Clips shorter than a horizon skip that horizon.
GeometricReport aggregate_over_k(const std::vector<ClipForecast>& clips, std::span<const double> horizons_s,
                                 double fps);

/// Horizon seconds to a prefix length, rounded to the nearest frame.
Index horizon_frames(double seconds, double fps);

}  // namespace gentac::metrics
