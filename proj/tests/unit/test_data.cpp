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

#include <doctest.h>

#include "gentac/data/clip_io.hpp"
#include "gentac/data/refine.hpp"
#include "gentac/data/resample.hpp"
#include "gentac/data/segment.hpp"

#include <cmath>
#include <filesystem>

using namespace gentac::data;
using gentac::numeric::Rng;

namespace {

const char* kListing = R"({
  "13590": {"ball": [6.50, 4.20], "team0": {"Player1": [-0.74, -30.28], "Player10": [-0.06, 9.86], "Player11": [-42.91, 0.74], "Player2": [-12.45, -8.44]}, "team1": {"Player15": [-25.95, 10.47], "Player16": [18.10, -0.48], "Player17": [17.50, -7.31]}},
  "13591": {"ball": [null, null], "team0": {"Player1": [-0.73, -30.41], "Player10": [-0.37, 11.14], "Player11": [-42.88, 0.83], "Player2": [-12.54, -8.62]}, "team1": {"Player15": [-25.86, 10.47], "Player16": [18.11, -0.70], "Player17": [17.46, -7.53]}}
}
)";

double round2(double v) { return std::round(v * 100.0) / 100.0; }

TrajectoryClip random_clip(Rng& rng, int frames, bool two_decimals) {
  TrajectoryClip c;
  c.players_per_team = 3;
  const std::int64_t first = rng.uniform_int(0, 100000);
  for (int f = 0; f < frames; ++f) {
    Frame fr;
    fr.index = first + f;
    auto draw = [&]() -> Position {
      if (rng.bernoulli(0.1)) return std::nullopt;
      double x = rng.uniform() * 105.0 - 52.5, y = rng.uniform() * 68.0 - 34.0;
      if (two_decimals) x = round2(x), y = round2(y);
      return Vec2(x, y);
    };
    fr.ball = draw();
    for (int t = 0; t < 2; ++t)
      for (int p = 0; p < 3; ++p) fr.teams[static_cast<std::size_t>(t)]["P" + std::to_string(t * 10 + p)] = draw();
    c.frames.push_back(fr);
  }
  return c;
}

/// Straight-line clip at constant velocity for every entity.
TrajectoryClip linear_clip(int frames, double fps, int players = 2) {
  TrajectoryClip c;
  c.fps = fps;
  c.players_per_team = players;
  for (int f = 0; f < frames; ++f) {
    Frame fr;
    fr.index = f;
    const double t = f / fps;
    fr.ball = Vec2(-10.0 + 6.0 * t, 2.0 - 1.5 * t);
    for (int k = 0; k < players; ++k) {
      fr.teams[0]["A" + std::to_string(k)] = Vec2(-20.0 + k + 3.0 * t, -10.0 + 2.0 * k + 1.0 * t);
      fr.teams[1]["B" + std::to_string(k)] = Vec2(15.0 - k - 2.0 * t, 5.0 - k + 0.5 * t);
    }
    c.frames.push_back(fr);
  }
  return c;
}

std::vector<Position*> positions(TrajectoryClip& c, std::size_t f) {
  std::vector<Position*> out{&c.frames[f].ball};
  for (auto& team : c.frames[f].teams)
    for (auto& [id, p] : team) out.push_back(&p);
  return out;
}

double max_player_speed(const TrajectoryClip& c) {
  double m = 0.0;
  for (std::size_t f = 0; f + 1 < c.frames.size(); ++f)
    for (std::size_t t = 0; t < 2; ++t)
      for (const auto& [id, p] : c.frames[f].teams[t]) {
        const Position& q = c.frames[f + 1].teams[t].at(id);
        if (p && q) m = std::max(m, (*q - *p).norm() * c.fps);
      }
  return m;
}

}  // namespace

TEST_CASE("parse_clip reads the frame-dictionary listing") {
  const TrajectoryClip c = parse_clip(kListing);
  REQUIRE(c.size() == 2);
  CHECK(c.frames[0].index == 13590);
  CHECK(c.frames[1].index == 13591);
  CHECK(*c.frames[0].ball == Vec2(6.50, 4.20));
  CHECK(*c.frames[0].teams[0].at("Player1") == Vec2(-0.74, -30.28));
  CHECK(*c.frames[0].teams[1].at("Player16") == Vec2(18.10, -0.48));
  CHECK(*c.frames[1].teams[0].at("Player10") == Vec2(-0.37, 11.14));
  CHECK_FALSE(c.frames[1].ball.has_value());
  CHECK(c.roster()[0] == std::vector<std::string>{"Player1", "Player10", "Player11", "Player2"});
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("parse_clip edge cases and errors") {
  CHECK(parse_clip("{}").empty());
  CHECK(parse_clip(" { } \n").empty());
  const char* unordered = R"({"5": {"ball": [1, 2], "team0": {}, "team1": {}}, "3": {"ball": [0, 0], "team0": {}, "team1": {}}})";
  const auto c = parse_clip(unordered);
  CHECK(c.frames[0].index == 3);
  CHECK(*c.frames[1].ball == Vec2(1, 2));

  CHECK_THROWS_AS(parse_clip(R"({"12a": {"ball": [0, 0], "team0": {}, "team1": {}}})"), DataError);
  CHECK_THROWS_AS(parse_clip(R"({"-1": {"ball": [0, 0], "team0": {}, "team1": {}}})"), DataError);
  CHECK_THROWS_AS(parse_clip(R"({"1": {"ball": ["a", 0], "team0": {}, "team1": {}}})"), DataError);
  CHECK_THROWS_AS(parse_clip(R"({"1": {"ball": [true, 0], "team0": {}, "team1": {}}})"), DataError);
  CHECK_THROWS_AS(parse_clip(R"({"1": {"ball": [1, null], "team0": {}, "team1": {}}})"), DataError);
  CHECK_THROWS_AS(parse_clip(R"({"1": {"ball": [1, 2, 3], "team0": {}, "team1": {}}})"), DataError);
  CHECK_THROWS_AS(parse_clip(R"({"1": {"ball": [1, 2], "team0": {}}})"), DataError);
  CHECK_THROWS_AS(parse_clip(R"({"1": {"ball": [1, 2], "team0": {}, "team1": {}})"), DataError);
  CHECK_THROWS_AS(parse_clip(R"({"1": {"ball": [1, 2], "team0": {}, "team1": {}}, "1": {"ball": [1, 2], "team0": {}, "team1": {}}})"),
                  DataError);
  const char* dup = R"({"1": {"ball": [0, 0], "team0": {"P1": [1, 1], "P1": [2, 2]}, "team1": {}}})";
  CHECK_THROWS_WITH_AS(parse_clip(dup), doctest::Contains("duplicate player id"), DataError);
  const auto lenient = parse_clip(dup, {.keep_duplicates = true});
  CHECK(*lenient.frames[0].teams[0].at("P1") == Vec2(1, 1));
  REQUIRE(lenient.frames[0].duplicates[0].size() == 1);
  CHECK(lenient.frames[0].duplicates[0][0].position == Vec2(2, 2));
}

TEST_CASE("serialize_clip fixpoints") {
  const auto c = parse_clip(kListing);
  const std::string s = serialize_clip(c);
  CHECK(parse_clip(s) == c);
  CHECK(serialize_clip(parse_clip(s)) == s);
  CHECK(s.find(R"("13590": {"ball": [6.50, 4.20], "team0": {"Player1": [-0.74, -30.28], "Player10": [-0.06, 9.86])") !=
        std::string::npos);
  CHECK(s.find(R"("13591": {"ball": [null, null])") != std::string::npos);

  TrajectoryClip missing = parse_clip(kListing);
  for (auto& f : missing.frames) f.ball.reset();
  CHECK(serialize_clip(missing).find("[6.50") == std::string::npos);
  CHECK(parse_clip(serialize_clip(missing)) == missing);

  CHECK(format_coordinate(-0.001) == "0.00");
  CHECK(format_coordinate(-0.005001) == "-0.01");
  CHECK(serialize_clip(TrajectoryClip{}) == "{}\n");
}

TEST_CASE("serialize_clip fuzz round trip") {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_clip(rng, 1 + static_cast<int>(rng.uniform_int(0, 6)), true);
    const std::string s = serialize_clip(c);
    const auto back = parse_clip(s);
    REQUIRE(back.frames == c.frames);
    REQUIRE(serialize_clip(back) == s);
  }
  // Unrounded input converges after one pass.
  Rng raw(7);
  const auto c = random_clip(raw, 5, false);
  const std::string once = serialize_clip(parse_clip(serialize_clip(c)));
  CHECK(serialize_clip(parse_clip(once)) == once);
}

TEST_CASE("load_clip and save_clip carry metadata") {
  const auto dir = std::filesystem::temp_directory_path() / "gentac_test_io";
  std::filesystem::remove_all(dir);
  TrajectoryClip c = parse_clip(kListing);
  c.fps = 10;
  c.sport = Sport::basketball;
  c.players_per_team = 5;
  c.meta.team = "Auckland";
  c.meta.event_type = "threat";
  save_clip(c, dir / "clip.json");
  CHECK(std::filesystem::exists(dir / "clip.meta.json"));
  const auto back = load_clip(dir / "clip.json");
  CHECK(back.frames == c.frames);
  CHECK(back.fps == 10);
  CHECK(back.sport == Sport::basketball);
  CHECK(back.players_per_team == 5);
  CHECK(back.meta.team == "Auckland");
  CHECK(back.meta.event_type == "threat");
  CHECK(back.meta.id == "clip");
  CHECK_THROWS_AS(load_clip(dir / "absent.json"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("validate rejects out-of-bounds, order and roster size") {
  TrajectoryClip c = parse_clip(kListing);
  CHECK_NOTHROW(c.validate());
  c.frames[0].ball = Vec2(53.0, 0.0);
  CHECK_NOTHROW(c.validate());
  c.frames[0].ball = Vec2(53.01, 0.0);
  CHECK_THROWS_AS(c.validate(), DataError);
  c = parse_clip(kListing);
  c.players_per_team = 3;
  CHECK_THROWS_AS(c.validate(), DataError);
  c = parse_clip(kListing);
  std::swap(c.frames[0], c.frames[1]);
  CHECK_THROWS_AS(c.validate(), DataError);
  CHECK(PitchSpec::for_sport(Sport::ice_hockey).area() == doctest::Approx(1560.0));
  for (Sport s : {Sport::soccer, Sport::basketball, Sport::american_football, Sport::ice_hockey}) {
    CHECK(sport_from_string(to_string(s)) == s);
    CHECK(PitchSpec::for_sport(s).length > 0);
    CHECK(PitchSpec::for_sport(s).width > 0);
  }
}

TEST_CASE("resample") {
  SUBCASE("12.5 to 25 fps midpoints on linear motion") {
    const auto c = linear_clip(6, 12.5);
    const auto r = resample(c, 25.0);
    REQUIRE(r.size() == 11);
    CHECK(r.fps == 25.0);
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(r.frames[k].index == static_cast<std::int64_t>(k));
      if (k % 2 == 1) {
        const Vec2 mid = 0.5 * (*c.frames[k / 2].ball + *c.frames[k / 2 + 1].ball);
        CHECK((*r.frames[k].ball - mid).norm() < 1e-12);
      } else {
        CHECK(*r.frames[k].ball == *c.frames[k / 2].ball);
      }
    }
  }
  SUBCASE("identical fps is the identity") {
    const auto c = linear_clip(9, 25.0);
    CHECK(resample(c, 25.0) == c);
  }
  SUBCASE("10 to 25 fps random walk against closed-form interpolation") {
    Rng rng(3);
    TrajectoryClip c;
    c.fps = 10;
    Vec2 p(0, 0);
    for (int f = 0; f < 31; ++f) {
      p += Vec2(rng.normal(), rng.normal());
      Frame fr;
      fr.index = f;
      fr.ball = p;
      fr.teams[0]["A"] = f == 12 ? Position{} : Position{Vec2(-p)};
      c.frames.push_back(fr);
    }
    const auto r = resample(c, 25.0);
    REQUIRE(r.size() == 76);  // 3 s span
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double tau = k / 25.0;
      const int i = std::min(static_cast<int>(std::floor(tau * 10.0 + 1e-9)), 29);
      const double w = tau * 10.0 - i;
      const Vec2 expect = (1 - w) * *c.frames[static_cast<std::size_t>(i)].ball + w * *c.frames[static_cast<std::size_t>(i + 1)].ball;
      CHECK((*r.frames[k].ball - expect).norm() < 1e-9);
      const bool exact = std::abs(w) < 1e-9 || std::abs(w - 1) < 1e-9;
      const int j = std::abs(w - 1) < 1e-9 ? i + 1 : i;
      const bool missing = exact ? j == 12 : (i == 12 || i + 1 == 12);
      CHECK(r.frames[k].teams[0].at("A").has_value() == !missing);
    }
    CHECK(*r.frames.back().ball == *c.frames.back().ball);
    CHECK(*r.frames.front().ball == *c.frames.front().ball);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(resample(linear_clip(1, 25.0), 25.0), DataError);
    CHECK_THROWS_AS(resample(linear_clip(3, 25.0), 0.0), DataError);
  }
}

TEST_CASE("bidirectional_ema matches a direct recurrence") {
  const std::vector<Vec2> xs{{0, 0}, {1, 2}, {3, 1}, {2, 2}};
  const double g = 0.6;
  const auto out = bidirectional_ema(xs, g);
  // f = [x0, g x1 + (1-g) x0, ...]; b symmetric.
  std::vector<Vec2> f(4), b(4);
  f[0] = xs[0];
  b[3] = xs[3];
  for (int i = 1; i < 4; ++i) f[static_cast<std::size_t>(i)] = g * xs[static_cast<std::size_t>(i)] + (1 - g) * f[static_cast<std::size_t>(i - 1)];
  for (int i = 2; i >= 0; --i) b[static_cast<std::size_t>(i)] = g * xs[static_cast<std::size_t>(i)] + (1 - g) * b[static_cast<std::size_t>(i + 1)];
  for (std::size_t i = 0; i < 4; ++i) CHECK((out[i] - 0.5 * (f[i] + b[i])).norm() < 1e-15);
  CHECK((out[1] - Vec2(1.12, 1.48)).norm() < 1e-12);
  CHECK(bidirectional_ema({}, 0.5).empty());
}

TEST_CASE("refine") {
  SUBCASE("clean constant velocity is unchanged with gamma 1") {
    const auto c = linear_clip(40, 25.0);
    const auto r = refine(c, {.gamma = 1.0});
    for (std::size_t f = 0; f < c.size(); ++f) {
      CHECK((*r.frames[f].ball - *c.frames[f].ball).norm() < 1e-9);
      for (std::size_t t = 0; t < 2; ++t)
        for (const auto& [id, p] : c.frames[f].teams[t]) CHECK((*r.frames[f].teams[t].at(id) - *p).norm() < 1e-9);
    }
  }
  SUBCASE("smoothing keeps a linear ramp exact away from the ends") {
    const auto c = linear_clip(120, 25.0);
    const auto r = refine(c);
    for (std::size_t f = 40; f < 80; ++f) CHECK((*r.frames[f].teams[0].at("A0") - *c.frames[f].teams[0].at("A0")).norm() < 1e-9);
  }
  SUBCASE("a 3-frame gap is filled with collinear points") {
    auto c = linear_clip(20, 25.0);
    for (std::size_t f = 8; f < 11; ++f) c.frames[f].teams[0].erase("A1");
    RefineReport rep;
    const auto r = refine(c, {.gamma = 1.0}, &rep);
    CHECK(rep.gaps_filled == 1);
    const Vec2 a = *r.frames[7].teams[0].at("A1"), b = *r.frames[11].teams[0].at("A1");
    for (std::size_t f = 8; f < 11; ++f) {
      const Vec2 p = *r.frames[f].teams[0].at("A1");
      const Vec2 u = p - a, v = b - a;
      CHECK(std::abs(u.x() * v.y() - u.y() * v.x()) < 1e-9);
      CHECK((p - *linear_clip(20, 25.0).frames[f].teams[0].at("A1")).norm() < 1e-9);
    }
  }
  SUBCASE("gaps longer than max_gap stay missing; boundary gaps hold") {
    auto c = linear_clip(30, 25.0);
    for (std::size_t f = 5; f < 20; ++f) c.frames[f].teams[1]["B0"].reset();
    for (std::size_t f = 0; f < 2; ++f) c.frames[f].teams[1]["B1"].reset();
    const auto r = refine(c, {.gamma = 1.0});
    CHECK_FALSE(r.frames[10].teams[1].at("B0").has_value());
    CHECK(*r.frames[0].teams[1].at("B1") == *c.frames[2].teams[1].at("B1"));
  }
  SUBCASE("a 30 m teleport of 5 players is flagged and reconstructed") {
    auto c = linear_clip(30, 25.0, 5);
    const std::size_t jump = 14;
    int moved = 0;
    for (auto& [id, p] : c.frames[jump].teams[0]) {
      *p += Vec2(30.0, 0.0) * (p->x() < 0 ? 1.0 : -1.0);
      ++moved;
    }
    REQUIRE(moved == 5);
    CHECK(max_player_speed(c) > 12.0);
    RefineReport rep;
    const auto r = refine(c, {}, &rep);
    CHECK(rep.anomalous_pairs == 2);
    CHECK(rep.frames_reconstructed == 1);
    // Speed-scan oracle over the refined output.
    CHECK(max_player_speed(r) <= 12.0);
    const auto clean = linear_clip(30, 25.0, 5);
    CHECK((*r.frames[jump].teams[0].at("A2") - *clean.frames[jump].teams[0].at("A2")).norm() < 1e-6);
  }
  SUBCASE("fewer fast players than anomaly_count are left alone") {
    auto c = linear_clip(10, 25.0);
    *c.frames[5].teams[0]["A0"] += Vec2(20, 0);
    RefineReport rep;
    refine(c, {}, &rep);
    CHECK(rep.anomalous_pairs == 0);
  }
  SUBCASE("teleport at the first frame is rebuilt from its single anchor") {
    auto c = linear_clip(10, 25.0, 4);
    for (auto& [id, p] : c.frames[0].teams[1]) *p += Vec2(-25, 0);
    RefineReport rep;
    const auto r = refine(c, {.gamma = 1.0}, &rep);
    CHECK(rep.frames_reconstructed == 1);
    CHECK(*r.frames[0].teams[1].at("B0") == *c.frames[1].teams[1].at("B0"));
  }
  SUBCASE("duplicate resolution keeps the detection nearest the last position") {
    const char* text = R"({
      "0": {"ball": [0, 0], "team0": {"P": [1.00, 1.00]}, "team1": {}},
      "1": {"ball": [0, 0], "team0": {"P": [9.00, 9.00], "P": [1.10, 1.00]}, "team1": {}},
      "2": {"ball": [0, 0], "team0": {"Q": [5.00, 0.00], "Q": [0.00, 5.00], "Q": [1.00, 3.00]}, "team1": {}}
    })";
    const auto c = parse_clip(text, {.keep_duplicates = true});
    RefineReport rep;
    const auto r = refine(c, {.max_gap = 0, .gamma = 1.0}, &rep);
    CHECK(rep.duplicates_resolved == 2);
    CHECK(*r.frames[1].teams[0].at("P") == Vec2(1.10, 1.00));
    // No history for Q: lowest coordinate sum wins (4 < 5).
    CHECK(*r.frames[2].teams[0].at("Q") == Vec2(1.00, 3.00));
    for (const auto& f : r.frames) CHECK(f.duplicates[0].empty());
  }
  SUBCASE("idempotent for gamma 1") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      auto c = linear_clip(40, 25.0, 4);
      for (std::size_t f = 0; f < c.size(); ++f)
        for (Position* p : positions(c, f)) {
          if (rng.bernoulli(0.08)) p->reset();
          else **p += Vec2(rng.normal(), rng.normal()) * 0.05;
        }
      const std::size_t j = static_cast<std::size_t>(rng.uniform_int(3, 35));
      for (auto& [id, p] : c.frames[j].teams[0])
        if (p) *p = Vec2(40.0, -30.0);
      for (int steps = 1; steps <= 4; ++steps) {
        RefineParams params{.max_gap = steps, .gamma = 1.0};
        const auto once = refine(c, params);
        const auto twice = refine(once, params);
        for (std::size_t f = 0; f < once.size(); ++f)
          for (std::size_t t = 0; t < 2; ++t)
            for (const auto& [id, p] : once.frames[f].teams[t]) {
              const Position& q = twice.frames[f].teams[t].at(id);
              REQUIRE(p.has_value() == q.has_value());
              if (p) REQUIRE((*p - *q).norm() < 1e-9);
            }
      }
    }
  }
}

TEST_CASE("normalize and denormalize") {
  const PitchSpec pitch;
  CHECK(normalize(Vec2(0, 0), pitch) == Vec2(0, 0));
  CHECK((normalize(Vec2(52.5, 34), pitch) - Vec2(1, 1)).norm() < 1e-15);
  CHECK((normalize(Vec2(-52.5, 34), pitch) - Vec2(-1, 1)).norm() < 1e-15);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p(rng.uniform() * 106 - 53, rng.uniform() * 69 - 34.5);
    CHECK((denormalize(normalize(p, pitch), pitch) - p).norm() < 1e-12);
  }
  auto c = linear_clip(3, 25.0);
  c.frames[1].ball = Vec2(60.0, 0.0);
  const Roster roster = Roster::of(c);
  CHECK_THROWS_AS(to_segment(c, roster, 0, 3), DataError);
}

TEST_CASE("segments and windows") {
  auto c = linear_clip(375, 25.0);  // 15 s
  c.players_per_team = 11;
  c.frames[3].teams[1]["B1"].reset();
  const Roster roster = Roster::of(c);
  CHECK(roster.entities() == 23);
  CHECK(roster.slot(0, "A1") == 1);
  CHECK(roster.ball() == 22);
  CHECK(Roster::group_of(10, 11) == 0);
  CHECK(Roster::group_of(11, 11) == 1);
  CHECK(Roster::group_of(22, 11) == 2);
  CHECK(roster.slot(1, "B0") == 11);
  CHECK(roster.slot(1, "Z") == -1);

  const Window w = window(c, roster, 0, 100, 125);
  CHECK(w.history.frames == 100);
  CHECK(w.future.frames == 125);
  CHECK(w.history.entities == 23);
  CHECK(w.history.visible.row(0).count() == 5);
  CHECK_FALSE(w.history.visible(3, roster.slot(1, "B1")));
  CHECK(w.history.at(3, roster.slot(1, "B1")) == Vec2(0, 0));
  CHECK((w.future.at(0, roster.ball()) - normalize(*c.frames[100].ball, c.pitch())).norm() < 1e-15);

  const Window z = window(c, roster, 10, 100, 0);
  CHECK(z.future.frames == 0);
  CHECK_THROWS_AS(window(c, roster, 200, 100, 125), DataError);

  const auto frames = to_frames(w.history, roster, c.pitch(), 0);
  CHECK((*frames[7].teams[0].at("A1") - *c.frames[7].teams[0].at("A1")).norm() < 1e-12);
  CHECK_FALSE(frames[3].teams[1].at("B1").has_value());

  const Segment joined = Segment::concat(w.history, w.future);
  CHECK(joined.frames == 225);
  CHECK(joined.slice(100, 125).coords == w.future.coords);

  for (Index len : {0, 50, 225, 226, 375, 1000})
    for (Index stride : {1, 7, 25}) {
      Index brute = 0;
      for (Index s = 0; s + 225 <= len; s += stride) ++brute;
      CHECK(count_windows(len, 100, 125, stride) == brute);
    }
}

TEST_CASE("flip_augment") {
  Segment s(2, 3);
  s.set(0, 0, Vec2(0.3, -0.5));
  s.set(0, 1, Vec2(-0.2, 0.1));
  s.set(1, 2, Vec2(0.9, 0.4));
  Rng rng(1);
  CHECK(flip_augment(s, 0.0, 0.0, rng).coords == s.coords);
  const Segment both = flip_augment(s, 1.0, 1.0, rng);
  CHECK(both.at(0, 0) == Vec2(-0.3, 0.5));
  CHECK(both.visible.cwiseEqual(s.visible).all());
  CHECK(flip(flip(s, true, false), true, false).coords == s.coords);

  Rng r2(9);
  for (int i = 0; i < 50; ++i) {
    const Segment f = flip_augment(s, 0.5, 0.5, r2);
    for (Index a = 0; a < 6; ++a)
      for (Index b = 0; b < 6; ++b)
        CHECK((f.coords.row(a) - f.coords.row(b)).norm() == doctest::Approx((s.coords.row(a) - s.coords.row(b)).norm()));
  }
}
