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

#include "gentac/model/taxonomy.hpp"

namespace gentac::model {

std::optional<int> type_index(std::string_view name) {
  for (int i = 0; i < kTypeCount; ++i)
    if (kTypeNames[static_cast<std::size_t>(i)] == name) return i;
  return std::nullopt;
}

std::optional<int> subtype_index(std::string_view name) {
  for (int i = 0; i < kSubtypeCount; ++i)
    if (kSubtypeNames[static_cast<std::size_t>(i)] == name) return i;
  return std::nullopt;
}

bool is_offense_subtype(std::string_view name) {
  return name == "goal" || name == "shot_saved" || name == "shot_off_target";
}

bool is_defense_subtype(std::string_view name) { return name == "clearance" || name == "defended"; }

}  // namespace gentac::model
