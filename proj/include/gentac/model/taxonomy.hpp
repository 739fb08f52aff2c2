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

#include <array>
#include <optional>
#include <string_view>

namespace gentac::model {

inline constexpr int kTypeCount = 5;
inline constexpr int kSubtypeCount = 15;

inline constexpr std::array<std::string_view, kTypeCount> kTypeNames{
    "build", "transition", "interruption", "set_piece", "threat"};

/// Subtypes grouped by type, in type order.
inline constexpr std::array<std::string_view, kSubtypeCount> kSubtypeNames{
    "build",
    "ball_win", "progression",
    "stoppage",
    "corner", "free_kick", "penalty", "throw_in", "kick_off", "goal_kick",
    "goal", "shot_off_target", "shot_saved", "clearance", "defended"};

/// First global subtype index of each type, plus the end sentinel.
inline constexpr std::array<int, kTypeCount + 1> kSubtypeOffset{0, 1, 3, 4, 10, 15};

constexpr int subtype_count(int type) { return kSubtypeOffset[type + 1] - kSubtypeOffset[type]; }

constexpr int type_of_subtype(int subtype) {
  int t = 0;
  while (subtype >= kSubtypeOffset[t + 1]) ++t;
  return t;
}

std::optional<int> type_index(std::string_view name);
std::optional<int> subtype_index(std::string_view name);

/// Objective label sets used for objective-conditioned fine-tuning.
bool is_offense_subtype(std::string_view name);
bool is_defense_subtype(std::string_view name);

}  // namespace gentac::model
