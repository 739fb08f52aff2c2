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

#include "gentac/metrics/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gentac::metrics {

namespace {

void check_aligned(const Segment& pred, const Segment& truth) {
  if (pred.frames != truth.frames || pred.entities != truth.entities)
    throw std::invalid_argument("prediction and truth differ in shape");
}

}  // namespace

Segment to_meters(const Segment& normalized, const data::PitchSpec& pitch) {
  Segment out = normalized;
  for (Index t = 0; t < out.frames; ++t)
    for (Index e = 0; e < out.entities; ++e)
      if (out.visible(t, e)) out.coords.row(out.row(t, e)) = data::denormalize(normalized.at(t, e), pitch).transpose();
  return out;
}

double ade(const Segment& pred, const Segment& truth, std::span<const Index> entities) {
  check_aligned(pred, truth);
  double total = 0;
  Index counted = 0;
  for (Index e : entities) {
    double sum = 0;
    Index n = 0;
    for (Index t = 0; t < truth.frames; ++t) {
      if (!truth.visible(t, e)) continue;
      sum += (pred.at(t, e) - truth.at(t, e)).norm();
      ++n;
    }
    if (n == 0) continue;
    total += sum / static_cast<double>(n);
    ++counted;
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

double fde(const Segment& pred, const Segment& truth, std::span<const Index> entities) {
  check_aligned(pred, truth);
  if (truth.frames == 0) return 0.0;
  const Index t = truth.frames - 1;
  double total = 0;
  Index counted = 0;
  for (Index e : entities) {
    if (!truth.visible(t, e)) continue;
    total += (pred.at(t, e) - truth.at(t, e)).norm();
    ++counted;
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

Index horizon_frames(double seconds, double fps) { return static_cast<Index>(std::llround(seconds * fps)); }

GeometricReport aggregate_over_k(const std::vector<ClipForecast>& clips, std::span<const double> horizons_s,
                                 double fps) {
  GeometricReport report;
  for (double h : horizons_s) {
    HorizonGeometry row;
    row.seconds = h;
    row.frames = horizon_frames(h, fps);
    for (const auto& clip : clips) {
      if (clip.samples.empty()) throw std::invalid_argument("aggregate_over_k needs K >= 1");
      if (row.frames < 1 || clip.truth.frames < row.frames) continue;
      const Segment truth = clip.truth.slice(0, row.frames);
      double min_a = INFINITY, min_f = INFINITY, sum_a = 0, sum_f = 0;
      for (const auto& s : clip.samples) {
        const Segment pred = s.slice(0, row.frames);
        const double a = ade(pred, truth, clip.entities), f = fde(pred, truth, clip.entities);
        min_a = std::min(min_a, a);
        min_f = std::min(min_f, f);
        sum_a += a;
        sum_f += f;
      }
      const double k = static_cast<double>(clip.samples.size());
      row.min_ade += min_a;
      row.avg_ade += sum_a / k;
      row.min_fde += min_f;
      row.avg_fde += sum_f / k;
      ++row.clips;
    }
    if (row.clips > 0) {
      const double n = static_cast<double>(row.clips);
      row.min_ade /= n;
      row.avg_ade /= n;
      row.min_fde /= n;
      row.avg_fde /= n;
    }
    report.horizons.push_back(row);
  }
  return report;
}

}  // namespace gentac::metrics
