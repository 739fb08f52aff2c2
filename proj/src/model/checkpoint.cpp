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

#include "gentac/model/checkpoint.hpp"

#include "gentac/data/clip_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace gentac::model {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

namespace {
constexpr const char* kMagic = "GENTAC-CHECKPOINT 1";
}

nlohmann::json to_json(const BackboneConfig& c) {
  return {{"d", c.d},           {"layers", c.layers}, {"heads", c.heads},
          {"per_team", c.per_team}, {"l_max", c.l_max}, {"mlp", c.mlp},
          {"mlp_ratio", c.mlp_ratio}, {"head", c.head == HeadKind::noise ? "noise" : "event"}};
}

BackboneConfig config_from_json(const nlohmann::json& j) {
  BackboneConfig c;
  c.d = j.value("d", c.d);
  c.layers = j.value("layers", c.layers);
  c.heads = j.value("heads", c.heads);
  c.per_team = j.value("per_team", c.per_team);
  c.l_max = j.value("l_max", c.l_max);
  c.mlp = j.value("mlp", c.mlp);
  c.mlp_ratio = j.value("mlp_ratio", c.mlp_ratio);
  const std::string head = j.value("head", std::string("noise"));
  if (head != "noise" && head != "event") throw std::invalid_argument("unknown head kind " + head);
  c.head = head == "noise" ? HeadKind::noise : HeadKind::event;
  c.validate();
  return c;
}

std::string serialize_checkpoint(const Model& model, const nlohmann::json& meta) {
  nlohmann::json header;
  header["config"] = to_json(model.config());
  header["meta"] = meta;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& p : model.params()) table.push_back({p->name, p->value.rows(), p->value.cols()});
  header["params"] = table;
  std::string out = std::string(kMagic) + "\n" + header.dump() + "\n";
  for (const auto& p : model.params()) {
    const auto bytes = static_cast<std::size_t>(p->value.size()) * sizeof(double);
    const std::size_t at = out.size();
    out.resize(at + bytes);
    std::memcpy(out.data() + at, p->value.data(), bytes);
  }
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  const std::size_t l1 = bytes.find('\n');
  if (l1 == std::string::npos || bytes.compare(0, l1, kMagic) != 0) throw std::runtime_error("not a gentac checkpoint");
  const std::size_t l2 = bytes.find('\n', l1 + 1);
  if (l2 == std::string::npos) throw std::runtime_error("truncated checkpoint header");
  const auto header = nlohmann::json::parse(bytes.substr(l1 + 1, l2 - l1 - 1));
  Checkpoint ck{Model(config_from_json(header.at("config"))), header.value("meta", nlohmann::json::object())};
  std::size_t at = l2 + 1;
  for (const auto& entry : header.at("params")) {
    const auto name = entry.at(0).get<std::string>();
    const auto rows = entry.at(1).get<Index>(), cols = entry.at(2).get<Index>();
    Matrix m(rows, cols);
    const auto n = static_cast<std::size_t>(m.size()) * sizeof(double);
    if (at + n > bytes.size()) throw std::runtime_error("truncated checkpoint data at " + name);
    std::memcpy(m.data(), bytes.data() + at, n);
    at += n;
    ck.model.params().add(name, std::move(m));
  }
  if (at != bytes.size()) throw std::runtime_error("trailing bytes in checkpoint");
  // Shapes must match a freshly built model of the recorded config.
  Model ref = Model::create(ck.model.config(), 0);
  copy_parameters(ck.model, ref);
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const nlohmann::json& meta) {
  data::write_text(path, serialize_checkpoint(model, meta));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(data::read_text(path)); }

void copy_parameters(const Model& src, Model& dst) {
  if (src.params().size() != dst.params().size())
    throw std::runtime_error("parameter count mismatch: " + std::to_string(src.params().size()) + " vs " +
                             std::to_string(dst.params().size()));
  for (const auto& p : dst.params()) {
    const numeric::Parameter* s = src.params().find(p->name);
    if (!s) throw std::runtime_error("missing parameter " + p->name);
    if (s->value.rows() != p->value.rows() || s->value.cols() != p->value.cols())
      throw std::runtime_error("shape mismatch for " + p->name);
    p->value = s->value;
  }
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gentac::model
