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

#include "gentac/data/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace gentac::data {

namespace {

using Series = std::vector<Position>;

struct Tracks {
  Series ball;
  std::array<std::vector<std::string>, 2> ids;
  std::array<std::vector<Series>, 2> players;
};

/// Picks among the primary detection and its duplicates: nearest to the last
/// known position, ties (and the no-history case) by lower x + y.
Vec2 pick(const Vec2& primary, const std::vector<Vec2>& extra, const Position& last) {
  Vec2 best = primary;
  auto better = [&](const Vec2& c) {
    if (last) {
      const double dc = (c - *last).norm(), db = (best - *last).norm();
      if (dc != db) return dc < db;
    }
    return c.sum() < best.sum();
  };
  for (const Vec2& c : extra)
    if (better(c)) best = c;
  return best;
}

Tracks build_tracks(const TrajectoryClip& clip, int& resolved) {
  Tracks tr;
  tr.ids = clip.roster();
  const std::size_t n = clip.frames.size();
  tr.ball.resize(n);
  for (std::size_t t = 0; t < 2; ++t) tr.players[t].assign(tr.ids[t].size(), Series(n));
  for (std::size_t f = 0; f < n; ++f) {
    const Frame& fr = clip.frames[f];
    tr.ball[f] = fr.ball;
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t p = 0; p < tr.ids[t].size(); ++p) {
        const std::string& id = tr.ids[t][p];
        Position pos;
        if (auto it = fr.teams[t].find(id); it != fr.teams[t].end()) pos = it->second;
        std::vector<Vec2> extra;
        for (const auto& d : fr.duplicates[t])
          if (d.id == id) extra.push_back(d.position);
        if (!extra.empty()) {
          ++resolved;
          Position last;
          for (std::size_t g = f; g-- > 0;)
            if (tr.players[t][p][g]) {
              last = tr.players[t][p][g];
              break;
            }
          if (pos) {
            pos = pick(*pos, extra, last);
          } else {
            pos = pick(extra.front(), {extra.begin() + 1, extra.end()}, last);
          }
        }
        tr.players[t][p][f] = pos;
      }
  }
  return tr;
}

/// Linear fill between observed anchors; runs touching a clip boundary hold
/// the nearest observation. Only runs of at most `max_gap` frames are filled.
int fill_gaps(Series& s, const std::vector<std::int64_t>& idx, int max_gap) {
  const std::size_t n = s.size();
  int filled = 0;
  std::size_t f = 0;
  while (f < n) {
    if (s[f]) {
      ++f;
      continue;
    }
    std::size_t e = f;
    while (e < n && !s[e]) ++e;
    const auto len = static_cast<int>(e - f);
    const bool has_left = f > 0, has_right = e < n;
    if (len <= max_gap && (has_left || has_right)) {
      for (std::size_t g = f; g < e; ++g) {
        if (has_left && has_right) {
          const double w = static_cast<double>(idx[g] - idx[f - 1]) / static_cast<double>(idx[e] - idx[f - 1]);
          s[g] = Vec2((1.0 - w) * *s[f - 1] + w * *s[e]);
        } else {
          s[g] = has_left ? s[f - 1] : s[e];
        }
      }
      ++filled;
    }
    f = e;
  }
  return filled;
}

}  // namespace

std::vector<Vec2> bidirectional_ema(const std::vector<Vec2>& xs, double gamma) {
  const std::size_t n = xs.size();
  if (n == 0) return {};
  std::vector<Vec2> fwd(n), bwd(n), out(n);
  fwd[0] = xs[0];
  for (std::size_t i = 1; i < n; ++i) fwd[i] = gamma * xs[i] + (1.0 - gamma) * fwd[i - 1];
  bwd[n - 1] = xs[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) bwd[i] = gamma * xs[i] + (1.0 - gamma) * bwd[i + 1];
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (fwd[i] + bwd[i]);
  return out;
}

TrajectoryClip refine(const TrajectoryClip& clip, const RefineParams& params, RefineReport* report) {
  RefineReport rep;
  const std::size_t n = clip.frames.size();
  Tracks tr = build_tracks(clip, rep.duplicates_resolved);
  std::vector<std::int64_t> idx(n);
  for (std::size_t f = 0; f < n; ++f) idx[f] = clip.frames[f].index;

  for (auto& team : tr.players)
    for (auto& s : team) rep.gaps_filled += fill_gaps(s, idx, params.max_gap);

  // Anomalous frame pairs (f, f+1).
  std::vector<bool> bad_pair(n > 0 ? n - 1 : 0, false);
  for (std::size_t f = 0; f + 1 < n; ++f) {
    const double dt = static_cast<double>(idx[f + 1] - idx[f]) / clip.fps;
    int fast = 0;
    for (const auto& team : tr.players)
      for (const auto& s : team)
        if (s[f] && s[f + 1] && (*s[f + 1] - *s[f]).norm() > params.v_max * dt) ++fast;
    if (fast >= params.anomaly_count) {
      bad_pair[f] = true;
      ++rep.anomalous_pairs;
    }
  }

  // A run of anomalous pairs a..b spans frames a..b+1; the frames strictly
  // inside are rebuilt from the two anchors. A run touching the clip start
  // or end also rebuilds the boundary frame from its single anchor.
  std::vector<Series*> all;
  all.push_back(&tr.ball);
  for (auto& team : tr.players)
    for (auto& s : team) all.push_back(&s);
  std::size_t p = 0;
  while (p < bad_pair.size()) {
    if (!bad_pair[p]) {
      ++p;
      continue;
    }
    std::size_t q = p;
    while (q + 1 < bad_pair.size() && bad_pair[q + 1]) ++q;
    // Anchors lo and hi; a single pair at a clip edge drops the edge anchor.
    std::optional<std::size_t> lo = p, hi = q + 1;
    if (p == q && p == 0 && q + 1 < bad_pair.size()) lo.reset();
    if (p == q && q + 1 == bad_pair.size() && p > 0) hi.reset();
    const std::size_t first = lo ? *lo + 1 : 0;
    const std::size_t last = hi ? *hi : n;
    for (std::size_t g = first; g < last; ++g) {
      for (Series* s : all) {
        const Position a = lo ? (*s)[*lo] : Position{};
        const Position b = hi ? (*s)[*hi] : Position{};
        if (a && b) {
          const double w = static_cast<double>(idx[g] - idx[*lo]) / static_cast<double>(idx[*hi] - idx[*lo]);
          (*s)[g] = Vec2((1.0 - w) * *a + w * *b);
        } else {
          (*s)[g] = a ? a : b;
        }
      }
      ++rep.frames_reconstructed;
    }
    p = q + 1;
  }

  // Smoothing over each contiguous observed run.
  if (params.gamma < 1.0) {
    for (Series* s : all) {
      std::size_t f = 0;
      while (f < n) {
        if (!(*s)[f]) {
          ++f;
          continue;
        }
        std::size_t e = f;
        std::vector<Vec2> run;
        while (e < n && (*s)[e]) run.push_back(*(*s)[e++]);
        const auto smooth = bidirectional_ema(run, params.gamma);
        for (std::size_t g = f; g < e; ++g) (*s)[g] = smooth[g - f];
        f = e;
      }
    }
  }

  TrajectoryClip out = clip;
  for (std::size_t f = 0; f < n; ++f) {
    Frame& fr = out.frames[f];
    fr.ball = tr.ball[f];
    for (std::size_t t = 0; t < 2; ++t) {
      fr.teams[t].clear();
      fr.duplicates[t].clear();
      for (std::size_t k = 0; k < tr.ids[t].size(); ++k) fr.teams[t][tr.ids[t][k]] = tr.players[t][k][f];
    }
  }
  if (report) *report = rep;
  return out;
}

}  // namespace gentac::data
