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

#include <filesystem>
#include <string>
#include <string_view>

namespace gentac::data {

struct ParseOptions {
  /// Keep repeated player ids within a team as Frame::duplicates instead of
  /// rejecting the input. The repair happens in refine().
  bool keep_duplicates = false;
};

/// Parses the frame-dictionary text format: a top-level map from decimal
/// frame-index strings to {"ball": [x, y], "team0": {id: [x, y]}, "team1": {...}}
/// with [null, null] marking a missing entity. Frames come back sorted by index.
TrajectoryClip parse_clip(std::string_view text, const ParseOptions& options = {});

/// Canonical text: one frame per line, ids in byte order, coordinates with two
/// decimals. parse_clip(serialize_clip(c)) == c for clips whose coordinates
/// are already two-decimal values.
std::string serialize_clip(const TrajectoryClip& clip);

/// Formats a coordinate the way serialize_clip does ("-0.00" becomes "0.00").
std::string format_coordinate(double v);

/// Loads `path` plus the optional `<stem>.meta.json` sidecar holding fps,
/// sport, players_per_team and conditioning tags.
TrajectoryClip load_clip(const std::filesystem::path& path, const ParseOptions& options = {});
/// Writes the clip text and its sidecar.
void save_clip(const TrajectoryClip& clip, const std::filesystem::path& path);

std::filesystem::path metadata_path(const std::filesystem::path& clip_path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace gentac::data
