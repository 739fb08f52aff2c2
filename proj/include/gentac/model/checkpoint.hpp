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

#include "gentac/model/backbone.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace gentac::model {

nlohmann::json to_json(const BackboneConfig& c);
BackboneConfig config_from_json(const nlohmann::json& j);

/// Self-describing container: a magic line, a one-line JSON header holding
/// the backbone config, caller metadata and the parameter table (name, rows,
/// cols), then every parameter as raw little-endian float64 in table order.
struct Checkpoint {
  Model model;
  nlohmann::json meta = nlohmann::json::object();
};

std::string serialize_checkpoint(const Model& model, const nlohmann::json& meta = nlohmann::json::object());
Checkpoint parse_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const nlohmann::json& meta = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies parameter values from `src`; throws when names or shapes differ.
void copy_parameters(const Model& src, Model& dst);

/// FNV-1a over the file bytes, as 16 hex digits.
std::string content_hash(const std::string& bytes);

}  // namespace gentac::model
