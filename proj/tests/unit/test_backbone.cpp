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

#include "gradcheck.hpp"

#include "gentac/model/backbone.hpp"
#include "gentac/model/checkpoint.hpp"

#include <filesystem>

using namespace gentac;
using namespace gentac::model;
using numeric::Rng;

namespace {

data::Segment random_segment(Rng& rng, Index frames, Index entities, double p_missing = 0.0) {
  data::Segment s(frames, entities);
  for (Index t = 0; t < frames; ++t)
    for (Index e = 0; e < entities; ++e)
      if (!rng.bernoulli(p_missing)) s.set(t, e, data::Vec2(2 * rng.uniform() - 1, 2 * rng.uniform() - 1));
  return s;
}

BackboneConfig tiny(int d = 8, int layers = 2, int per_team = 3) {
  BackboneConfig c;
  c.d = d;
  c.layers = layers;
  c.heads = 2;
  c.per_team = per_team;
  c.l_max = 16;
  return c;
}

Matrix run_encode(Model& m, const TokenBatch& b) {
  Tape tape;
  return encode(tape, m, b).value();
}

}  // namespace

TEST_CASE("build_token_grid counts") {
  Rng rng(1);
  const auto hist = random_segment(rng, 100, 23);
  const auto fut = random_segment(rng, 5, 23);
  const TokenGrid joint = build_token_grid(hist, fut, Task::forecast_joint);
  CHECK(joint.frames == 105);
  CHECK(joint.entities == 23);
  CHECK(joint.coords.rows() == 105 * 23);
  CHECK(joint.noise_count() == 5 * 23);
  CHECK_FALSE(joint.noise_target.topRows(100).any());

  const TokenGrid single = build_token_grid(hist, fut, Task::forecast_single, 0);
  CHECK(single.noise_count() == 5 * 11);
  for (Index e = 0; e < 23; ++e) CHECK(single.noise_target(102, e) == (e < 11));
  // Ball and opponent futures carry the ground truth.
  CHECK(single.coords.row(101 * 23 + 22) == fut.coords.row(1 * 23 + 22));
  CHECK(single.coords.row(101 * 23 + 15) == fut.coords.row(1 * 23 + 15));
  const TokenGrid with_ball = build_token_grid(hist, fut, Task::forecast_single, 1, {.ball_is_target = true});
  CHECK(with_ball.noise_count() == 5 * 12);

  const auto clip = random_segment(rng, 80, 23);
  const TokenGrid ev = build_token_grid(clip, {}, Task::event, 0, {.l_max = 250});
  CHECK(ev.frames == 250);
  CHECK(ev.visible.bottomRows(170).count() == 0);
  CHECK(ev.visible.topRows(80).count() == 80 * 23);
  CHECK(ev.noise_count() == 0);
  const auto longer = random_segment(rng, 300, 23);
  const TokenGrid cut = build_token_grid(longer, {}, Task::event, 0, {.l_max = 250});
  CHECK(cut.frames == 250);
  CHECK(cut.coords.row(0) == longer.coords.row(50 * 23));

  auto sparse = fut;
  sparse.visible(2, 4) = false;
  CHECK(build_token_grid(hist, sparse, Task::forecast_joint).noise_count() == 5 * 23 - 1);
  CHECK_THROWS(build_token_grid(hist, random_segment(rng, 5, 7), Task::forecast_joint));
}

TEST_CASE("embed is additive") {
  BackboneConfig cfg = tiny(8, 0);
  Model m = Model::create(cfg, 3);
  Rng rng(2);
  data::Segment zero(4, 7);
  for (Index t = 0; t < 4; ++t)
    for (Index e = 0; e < 7; ++e) zero.set(t, e, data::Vec2(0, 0));
  const TokenGrid g = build_token_grid(zero, {}, Task::event, 0, {.l_max = 4});
  const TokenBatch b = stack(g);
  Tape tape;
  const Matrix h = embed(tape, m, b).value();
  const auto& P = m.params();
  for (Index t = 0; t < 4; ++t)
    for (Index e = 0; e < 7; ++e) {
      const Matrix expect = P.at("embed.time").value.row(t) + P.at("embed.group").value.row(data::Roster::group_of(e, 3)) +
                            P.at("embed.entity").value.row(e) + P.at("embed.role").value.row(0);
      CHECK((h.row(t * 7 + e) - expect).cwiseAbs().maxCoeff() < 1e-15);
    }
  // Same group, same frame: difference is entity embedding plus projection.
  const auto seg = random_segment(rng, 4, 7);
  const TokenBatch b2 = stack(build_token_grid(seg, {}, Task::event, 0, {.l_max = 4}));
  Tape t2;
  const Matrix h2 = embed(t2, m, b2).value();
  const Matrix W = P.at("embed.in.w").value;
  const Matrix diff = h2.row(2 * 7 + 1) - h2.row(2 * 7 + 0);
  const Matrix expect = P.at("embed.entity").value.row(1) - P.at("embed.entity").value.row(0) +
                        (seg.coords.row(2 * 7 + 1) - seg.coords.row(2 * 7 + 0)) * W;
  CHECK((diff - expect).cwiseAbs().maxCoeff() < 1e-14);

  BackboneConfig big = tiny(16, 1, 11);
  big.l_max = 128;
  Model mb = Model::create(big, 1);
  const TokenBatch bb = stack(build_token_grid(random_segment(rng, 100, 23), random_segment(rng, 5, 23), Task::forecast_joint), 7);
  const Matrix hb = run_encode(mb, bb);
  CHECK(hb.rows() == 105 * 23);
  CHECK(hb.cols() == 16);

  big.l_max = 50;
  Model small = Model::create(big, 1);
  CHECK_THROWS(run_encode(small, bb));
}

TEST_CASE("attention weights and single-token cases") {
  Model m = Model::create(tiny(8, 1), 5);
  Rng rng(3);
  auto seg = random_segment(rng, 6, 7, 0.3);
  seg.visible.row(0).setConstant(false);
  seg.visible(0, 2) = true;
  TokenGrid g = build_token_grid(seg, {}, Task::event, 0, {.l_max = 8});
  const TokenBatch b = stack(g);
  std::vector<Matrix> w;
  run_encode(m, b);
  {
    Tape tape;
    encode(tape, m, b, &w);
  }
  // Spatial groups (8 frames x 2 heads) then temporal (7 entities x 2 heads).
  REQUIRE(w.size() == 8 * 2 + 7 * 2);
  for (const Matrix& a : w)
    for (Index r = 0; r < a.rows(); ++r)
      if (a.cols() > 0) CHECK(std::abs(a.row(r).sum() - 1.0) < 1e-10);
  // Frame 0 has one visible entity: every query puts weight 1 on it.
  CHECK(w[0].cols() == 1);
  CHECK(w[0].isOnes());

  // Temporal attention over a single frame is the value feed-through.
  Model m1 = Model::create(tiny(8, 1), 6);
  const TokenBatch one = stack(build_token_grid(random_segment(rng, 1, 7), {}, Task::event, 0, {.l_max = 1}));
  Tape tape;
  const Var h = embed(tape, m1, one);
  const Var out = temporal_attention(tape, m1, 0, h, one);
  const auto& P = m1.params();
  Matrix x = h.value();
  for (Index r = 0; r < x.rows(); ++r) {
    const double mu = x.row(r).mean();
    const double var = (x.row(r).array() - mu).square().mean();
    x.row(r) = ((x.row(r).array() - mu) / std::sqrt(var + 1e-5)).matrix().cwiseProduct(P.at("layer0.temporal.ln.g").value.row(0)) +
               P.at("layer0.temporal.ln.b").value.row(0);
  }
  Matrix expect = h.value() + x * P.at("layer0.temporal.v").value * P.at("layer0.temporal.out.w").value;
  expect.rowwise() += P.at("layer0.temporal.out.b").value.row(0);
  CHECK((out.value() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mask isolation through the full encoder") {
  Model m = Model::create(tiny(8, 2), 9);
  Rng rng(4);
  auto seg = random_segment(rng, 10, 7, 0.2);
  TokenGrid g = build_token_grid(seg, {}, Task::event, 0, {.l_max = 14});
  const Matrix base = run_encode(m, stack(g));
  // Perturb every masked token (including padded frames).
  TokenGrid p = g;
  for (Index r = 0; r < p.coords.rows(); ++r)
    if (!p.visible(r / 7, r % 7)) p.coords.row(r) << 1e3 * rng.normal(), 1e3 * rng.normal();
  const Matrix moved = run_encode(m, stack(p));
  int compared = 0;
  for (Index r = 0; r < base.rows(); ++r)
    if (g.visible(r / 7, r % 7)) {
      CHECK(base.row(r) == moved.row(r));
      ++compared;
    }
  CHECK(compared == g.visible.count());
}

TEST_CASE("permutation covariance within a team") {
  Model m = Model::create(tiny(8, 2), 10);
  Rng rng(5);
  const auto seg = random_segment(rng, 5, 7);
  const TokenGrid g = build_token_grid(seg, {}, Task::event, 0, {.l_max = 5});
  const Matrix base = run_encode(m, stack(g));
  TokenGrid swapped = g;
  for (Index t = 0; t < 5; ++t) {
    swapped.coords.row(t * 7 + 0).swap(swapped.coords.row(t * 7 + 2));
  }
  Model m2 = m.clone();
  m2.params().at("embed.entity").value.row(0).swap(m2.params().at("embed.entity").value.row(2));
  const Matrix out = run_encode(m2, stack(swapped));
  for (Index t = 0; t < 5; ++t) {
    CHECK((out.row(t * 7 + 0) - base.row(t * 7 + 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((out.row(t * 7 + 2) - base.row(t * 7 + 0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((out.row(t * 7 + 4) - base.row(t * 7 + 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("encode with zero layers equals embed") {
  Model m = Model::create(tiny(8, 0), 2);
  Rng rng(6);
  const TokenBatch b = stack(build_token_grid(random_segment(rng, 3, 7), random_segment(rng, 2, 7), Task::forecast_joint), 4);
  Tape t1, t2;
  CHECK(encode(t1, m, b).value() == embed(t2, m, b).value());
}

TEST_CASE("full model gradient matches finite differences") {
  for (bool mlp : {false, true}) {
    BackboneConfig cfg = tiny(8, 2);
    cfg.mlp = mlp;
    cfg.mlp_ratio = 2;
    Model m = Model::create(cfg, 11);
    Rng rng(7);
    const TokenGrid g1 = build_token_grid(random_segment(rng, 8, 7, 0.1), random_segment(rng, 4, 7, 0.1), Task::forecast_joint);
    const TokenGrid g2 = build_token_grid(random_segment(rng, 8, 7, 0.1), random_segment(rng, 4, 7, 0.1), Task::forecast_single, 1);
    const TokenBatch b = stack({&g1, &g2}, {3, 77});
    Matrix target(b.rows(), 2);
    for (Index i = 0; i < target.size(); ++i) target.data()[i] = rng.normal();
    const Matrix weight = b.noise_weight();
    const auto res = testing::gradient_check(m.params(), [&](Tape& tape) {
      return numeric::weighted_mse(noise_head(tape, m, encode(tape, m, b)), target, weight);
    });
    INFO("worst " << res.worst);
    CHECK(res.max_rel_error < 1e-4);
  }
}

TEST_CASE("checkpoint round trip") {
  BackboneConfig cfg = tiny(8, 1);
  Model m = Model::create(cfg, 12);
  const std::string bytes = serialize_checkpoint(m, {{"fps", 10}});
  const Checkpoint ck = parse_checkpoint(bytes);
  CHECK(ck.model.config() == cfg);
  CHECK(ck.meta.at("fps") == 10);
  REQUIRE(ck.model.params().size() == m.params().size());
  for (const auto& p : m.params()) CHECK(ck.model.params().at(p->name).value == p->value);
  CHECK(serialize_checkpoint(ck.model, ck.meta) == bytes);
  CHECK(content_hash(bytes).size() == 16);

  CHECK_THROWS(parse_checkpoint("nonsense"));
  CHECK_THROWS(parse_checkpoint(bytes.substr(0, bytes.size() - 8)));
  Model other = Model::create(tiny(16, 1), 1);
  CHECK_THROWS(copy_parameters(m, other));

  BackboneConfig ev = cfg;
  ev.head = HeadKind::event;
  const Model em = Model::create(ev, 1);
  CHECK(parse_checkpoint(serialize_checkpoint(em)).model.config().head == HeadKind::event);

  const auto path = std::filesystem::temp_directory_path() / "gentac_ckpt_test.ckpt";
  save_checkpoint(path, m);
  CHECK(load_checkpoint(path).model.params().at("embed.time").value == m.params().at("embed.time").value);
  std::filesystem::remove(path);
}

TEST_CASE("same seed builds identical parameters") {
  const Model a = Model::create(tiny(), 42), b = Model::create(tiny(), 42), c = Model::create(tiny(), 43);
  CHECK(serialize_checkpoint(a) == serialize_checkpoint(b));
  CHECK(serialize_checkpoint(a) != serialize_checkpoint(c));
  BackboneConfig bad = tiny();
  bad.heads = 3;
  CHECK_THROWS(Model::create(bad, 1));
}
