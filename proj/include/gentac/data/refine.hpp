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

namespace gentac::data {

struct RefineParams {
  /// Longest run of missing frames that gap interpolation fills.
  int max_gap = 12;
  /// Speed (m/s) above which a per-frame displacement is implausible.
  double v_max = 12.0;
  /// A frame pair is anomalous when at least this many players exceed v_max.
  int anomaly_count = 3;
  /// EMA factor; 1 disables smoothing.
  double gamma = 0.85;
};

struct RefineReport {
  int duplicates_resolved = 0;
  int gaps_filled = 0;
  int anomalous_pairs = 0;
  int frames_reconstructed = 0;
};

/// Duplicate resolution, gap fill, anomaly detection, anomalous-span
/// reconstruction and bidirectional EMA smoothing, in that order. Players
/// are processed over the full roster, so the output lists every roster id
/// in every frame (missing ones as null). The ball takes part only in
/// span reconstruction and smoothing.
TrajectoryClip refine(const TrajectoryClip& clip, const RefineParams& params = {},
                      RefineReport* report = nullptr);

/// Forward pass f_t = g x_t + (1-g) f_{t-1}, backward pass likewise from the
/// end, output (f + b) / 2. Exposed for testing.
std::vector<Vec2> bidirectional_ema(const std::vector<Vec2>& xs, double gamma);

}  // namespace gentac::data
