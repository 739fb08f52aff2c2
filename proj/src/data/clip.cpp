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

#include "gentac/data/clip.hpp"

#include <set>

namespace gentac::data {

std::string_view to_string(Sport s) {
  switch (s) {
    case Sport::soccer: return "soccer";
    case Sport::basketball: return "basketball";
    case Sport::american_football: return "american_football";
    case Sport::ice_hockey: return "ice_hockey";
  }
  return "soccer";
}

Sport sport_from_string(std::string_view s) {
  if (s == "soccer") return Sport::soccer;
  if (s == "basketball") return Sport::basketball;
  if (s == "american_football") return Sport::american_football;
  if (s == "ice_hockey") return Sport::ice_hockey;
  throw DataError("unknown sport: " + std::string(s));
}

int players_per_team(Sport s) {
  switch (s) {
    case Sport::soccer: return 11;
    case Sport::basketball: return 5;
    case Sport::american_football: return 11;
    case Sport::ice_hockey: return 6;
  }
  return 11;
}

PitchSpec PitchSpec::for_sport(Sport s) {
  switch (s) {
    case Sport::soccer: return {105.0, 68.0};
    case Sport::basketball: return {28.0, 15.0};
    case Sport::american_football: return {109.73, 48.77};  // 120 x 53.33 yd
    case Sport::ice_hockey: return {60.0, 26.0};
  }
  return {};
}

bool PitchSpec::contains(const Vec2& p, double slack) const {
  return std::abs(p.x()) <= half_length() + slack && std::abs(p.y()) <= half_width() + slack;
}

std::array<std::vector<std::string>, 2> TrajectoryClip::roster() const {
  std::array<std::set<std::string>, 2> ids;
  for (const Frame& f : frames)
    for (int t = 0; t < 2; ++t) {
      for (const auto& [id, pos] : f.teams[static_cast<std::size_t>(t)]) ids[static_cast<std::size_t>(t)].insert(id);
      for (const auto& d : f.duplicates[static_cast<std::size_t>(t)]) ids[static_cast<std::size_t>(t)].insert(d.id);
    }
  return {std::vector<std::string>(ids[0].begin(), ids[0].end()),
          std::vector<std::string>(ids[1].begin(), ids[1].end())};
}

void TrajectoryClip::validate(double slack) const {
  if (!(fps > 0.0)) throw DataError("fps must be positive");
  const PitchSpec p = pitch();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    if (i > 0 && f.index <= frames[i - 1].index)
      throw DataError("frame indices must be strictly increasing (at " + std::to_string(f.index) + ")");
    auto check = [&](const Position& pos, const std::string& who) {
      if (pos && !p.contains(*pos, slack))
        throw DataError("position of " + who + " at frame " + std::to_string(f.index) +
                        " lies outside the pitch");
    };
    check(f.ball, "ball");
    for (const auto& team : f.teams)
      for (const auto& [id, pos] : team) check(pos, id);
  }
  const auto r = roster();
  for (const auto& ids : r)
    if (static_cast<int>(ids.size()) > players_per_team)
      throw DataError("roster of " + std::to_string(ids.size()) + " exceeds " +
                      std::to_string(players_per_team) + " players per team");
}

}  // namespace gentac::data
