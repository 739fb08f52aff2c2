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

#include "gentac/data/clip_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gentac::data {

namespace {

using json = nlohmann::json;

bool is_frame_key(std::string_view key) {
  if (key.empty() || key.size() > 18) return false;
  return std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; });
}

/// SAX handler that builds frames directly, so repeated keys can be seen
/// (a DOM parse would silently keep the last one).
class FrameBuilder : public nlohmann::json_sax<json> {
 public:
  explicit FrameBuilder(const ParseOptions& options) : options_(options) {}

  std::vector<Frame> take() { return std::move(frames_); }

  bool null() override { return scalar(std::nullopt); }
  bool boolean(bool) override { return reject_value("boolean"); }
  bool number_integer(number_integer_t v) override { return scalar(static_cast<double>(v)); }
  bool number_unsigned(number_unsigned_t v) override { return scalar(static_cast<double>(v)); }
  bool number_float(number_float_t v, const string_t&) override { return scalar(v); }
  bool string(string_t&) override { return reject_value("string"); }
  bool binary(binary_t&) override { return reject_value("binary"); }

  bool start_object(std::size_t) override {
    switch (state_) {
      case State::root: state_ = State::frame_key; return true;
      case State::frame_object: state_ = State::frame_field; return true;
      case State::team_object: state_ = State::player_key; return true;
      default: fail("unexpected object");
    }
    return false;
  }

  bool key(string_t& k) override {
    switch (state_) {
      case State::frame_key: {
        if (!is_frame_key(k)) fail("malformed frame key \"" + k + "\"");
        const std::int64_t index = std::stoll(k);
        if (!seen_frames_.insert(index).second) fail("duplicate frame key \"" + k + "\"");
        frames_.emplace_back();
        frames_.back().index = index;
        seen_fields_.clear();
        state_ = State::frame_object;
        return true;
      }
      case State::frame_field: {
        if (!seen_fields_.insert(k).second) fail("duplicate field \"" + k + "\" in frame");
        if (k == "ball") {
          target_ = Target{-1, {}};
          state_ = State::position;
        } else if (k == "team0" || k == "team1") {
          team_ = k == "team0" ? 0 : 1;
          state_ = State::team_object;
        } else {
          fail("unknown frame field \"" + k + "\"");
        }
        return true;
      }
      case State::player_key:
        target_ = Target{team_, k};
        state_ = State::position;
        return true;
      default: fail("unexpected key \"" + k + "\"");
    }
    return false;
  }

  bool end_object() override {
    switch (state_) {
      case State::player_key: state_ = State::frame_field; return true;
      case State::frame_field:
        if (!seen_fields_.count("team0") || !seen_fields_.count("team1"))
          fail("frame " + std::to_string(frames_.back().index) + " lacks team0/team1");
        state_ = State::frame_key;
        return true;
      case State::frame_key: state_ = State::done; return true;
      default: fail("unbalanced object");
    }
    return false;
  }

  bool start_array(std::size_t) override {
    if (state_ != State::position) fail("unexpected array");
    values_.clear();
    state_ = State::position_values;
    return true;
  }

  bool end_array() override {
    if (state_ != State::position_values) fail("unbalanced array");
    if (values_.size() != 2) fail("positions must have exactly two coordinates");
    Position pos;
    if (values_[0] && values_[1]) {
      pos = Vec2(*values_[0], *values_[1]);
    } else if (values_[0] || values_[1]) {
      fail("non-numeric coordinate (half-null position)");
    }
    store(pos);
    return true;
  }

  bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& e) override {
    fail("malformed clip text at byte " + std::to_string(position) + ": " + e.what());
    return false;
  }

 private:
  enum class State { root, frame_key, frame_object, frame_field, team_object, player_key, position,
                     position_values, done };
  struct Target {
    int team;  // -1 for the ball
    std::string id;
  };

  [[noreturn]] void fail(const std::string& what) { throw DataError(what); }

  bool reject_value(const char* kind) {
    if (state_ == State::position_values) fail(std::string("non-numeric coordinate (") + kind + ")");
    fail(std::string("unexpected ") + kind);
  }

  bool scalar(std::optional<double> v) {
    if (state_ != State::position_values) fail("unexpected scalar value");
    values_.push_back(v);
    return true;
  }

  void store(const Position& pos) {
    Frame& f = frames_.back();
    if (target_.team < 0) {
      f.ball = pos;
      state_ = State::frame_field;
      return;
    }
    auto& team = f.teams[static_cast<std::size_t>(target_.team)];
    auto [it, inserted] = team.try_emplace(target_.id, pos);
    if (!inserted) {
      if (!options_.keep_duplicates)
        fail("duplicate player id \"" + target_.id + "\" in team" + std::to_string(target_.team) +
             " at frame " + std::to_string(f.index));
      if (!it->second) {
        it->second = pos;
      } else if (pos) {
        f.duplicates[static_cast<std::size_t>(target_.team)].push_back({target_.id, *pos});
      }
    }
    state_ = State::player_key;
  }

  const ParseOptions& options_;
  State state_ = State::root;
  std::vector<Frame> frames_;
  std::set<std::int64_t> seen_frames_;
  std::set<std::string> seen_fields_;
  int team_ = 0;
  Target target_{-1, {}};
  std::vector<std::optional<double>> values_;
};

void append_position(std::string& out, const Position& p) {
  if (!p) {
    out += "[null, null]";
    return;
  }
  out += '[';
  out += format_coordinate(p->x());
  out += ", ";
  out += format_coordinate(p->y());
  out += ']';
}

void append_team(std::string& out, const TeamMap& team) {
  out += '{';
  bool first = true;
  for (const auto& [id, pos] : team) {
    if (!first) out += ", ";
    first = false;
    out += json(id).dump();
    out += ": ";
    append_position(out, pos);
  }
  out += '}';
}

}  // namespace

std::string format_coordinate(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

TrajectoryClip parse_clip(std::string_view text, const ParseOptions& options) {
  FrameBuilder builder(options);
  json::sax_parse(text.begin(), text.end(), &builder);
  TrajectoryClip clip;
  clip.frames = builder.take();
  std::sort(clip.frames.begin(), clip.frames.end(),
            [](const Frame& a, const Frame& b) { return a.index < b.index; });
  return clip;
}

std::string serialize_clip(const TrajectoryClip& clip) {
  if (clip.frames.empty()) return "{}\n";
  std::string out = "{\n";
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    const Frame& f = clip.frames[i];
    out += "  \"" + std::to_string(f.index) + "\": {\"ball\": ";
    append_position(out, f.ball);
    out += ", \"team0\": ";
    append_team(out, f.teams[0]);
    out += ", \"team1\": ";
    append_team(out, f.teams[1]);
    out += '}';
    out += i + 1 < clip.frames.size() ? ",\n" : "\n";
  }
  out += "}\n";
  return out;
}

std::filesystem::path metadata_path(const std::filesystem::path& clip_path) {
  auto p = clip_path;
  p.replace_extension(".meta.json");
  return p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

TrajectoryClip load_clip(const std::filesystem::path& path, const ParseOptions& options) {
  TrajectoryClip clip = parse_clip(read_text(path), options);
  clip.meta.id = path.stem().string();
  const auto meta = metadata_path(path);
  if (std::filesystem::exists(meta)) {
    const json j = json::parse(read_text(meta));
    clip.fps = j.value("fps", clip.fps);
    if (j.contains("sport")) {
      clip.sport = sport_from_string(j.at("sport").get<std::string>());
      clip.players_per_team = players_per_team(clip.sport);
    }
    clip.players_per_team = j.value("players_per_team", clip.players_per_team);
    clip.meta.team = j.value("team", "");
    clip.meta.league = j.value("league", "");
    clip.meta.event_type = j.value("event_type", "");
    clip.meta.event_subtype = j.value("event_subtype", "");
  }
  return clip;
}

void save_clip(const TrajectoryClip& clip, const std::filesystem::path& path) {
  write_text(path, serialize_clip(clip));
  json j;
  j["fps"] = clip.fps;
  j["sport"] = std::string(to_string(clip.sport));
  j["players_per_team"] = clip.players_per_team;
  if (!clip.meta.team.empty()) j["team"] = clip.meta.team;
  if (!clip.meta.league.empty()) j["league"] = clip.meta.league;
  if (!clip.meta.event_type.empty()) j["event_type"] = clip.meta.event_type;
  if (!clip.meta.event_subtype.empty()) j["event_subtype"] = clip.meta.event_subtype;
  write_text(metadata_path(path), j.dump(2) + "\n");
}

}  // namespace gentac::data
