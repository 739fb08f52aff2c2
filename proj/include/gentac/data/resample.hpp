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

/// Linear interpolation onto a uniform grid at `target_fps`, spanning the
/// source time range [first, last] without extrapolation. Source time is
/// (index - first_index) / fps. An output instant is missing when either
/// bracketing observation is missing; instants that coincide with a source
/// frame copy it exactly. Output indices are contiguous.
TrajectoryClip resample(const TrajectoryClip& clip, double target_fps);

}  // namespace gentac::data
