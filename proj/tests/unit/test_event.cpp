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

#include "gentac/event/event.hpp"

#include <algorithm>
#include <cmath>

using namespace gentac;
using namespace gentac::event;
using model::kSubtypeCount;
using model::kTypeCount;
using numeric::Rng;

namespace {

std::array<Eigen::RowVectorXd, kTypeCount> zero_sub_logits() {
  std::array<Eigen::RowVectorXd, kTypeCount> s;
  for (int t = 0; t < kTypeCount; ++t) s[static_cast<std::size_t>(t)] = Eigen::RowVectorXd::Zero(model::subtype_count(t));
  return s;
}

data::Segment random_segment(Rng& rng, Index frames, Index entities) {
  data::Segment s(frames, entities);
  for (Index t = 0; t < frames; ++t)
    for (Index e = 0; e < entities; ++e) s.set(t, e, data::Vec2(2 * rng.uniform() - 1, 2 * rng.uniform() - 1));
  return s;
}

model::BackboneConfig event_config() {
  model::BackboneConfig c;
  c.d = 8;
  c.layers = 1;
  c.heads = 2;
  c.per_team = 3;
  c.l_max = 6;
  c.head = model::HeadKind::event;
  return c;
}

class ZeroPredictor : public diffusion::NoisePredictor {
 protected:
  Matrix predict(const model::TokenBatch& b) override { return Matrix::Zero(b.rows(), 2); }
};

}  // namespace

TEST_CASE("taxonomy") {
  CHECK(model::kSubtypeOffset.back() == kSubtypeCount);
  int total = 0;
  for (int t = 0; t < kTypeCount; ++t) total += model::subtype_count(t);
  CHECK(total == 15);
  CHECK(model::type_of_subtype(0) == 0);
  CHECK(model::type_of_subtype(2) == 1);
  CHECK(model::type_of_subtype(3) == 2);
  CHECK(model::type_of_subtype(9) == 3);
  CHECK(model::type_of_subtype(14) == 4);
  CHECK(*model::subtype_index("shot_saved") == 12);
  CHECK(*model::type_index("set_piece") == 3);
  CHECK_FALSE(model::subtype_index("offside").has_value());
  CHECK(label_from_subtype(11).type == 4);
}

TEST_CASE("uniform heads give the analytic combined pattern") {
  const EventPrediction p = make_prediction(Eigen::RowVectorXd::Zero(5), zero_sub_logits());
  const double expect[15] = {1.0 / 5, 1.0 / 10, 1.0 / 10, 1.0 / 5, 1.0 / 30, 1.0 / 30, 1.0 / 30, 1.0 / 30, 1.0 / 30,
                             1.0 / 30, 1.0 / 25, 1.0 / 25, 1.0 / 25, 1.0 / 25, 1.0 / 25};
  for (int j = 0; j < 15; ++j) CHECK(std::abs(p.combined(j) - expect[j]) < 1e-15);
  CHECK(std::abs(p.combined.sum() - 1.0) < 1e-12);
  CHECK(std::abs(hierarchical_loss(p, label_from_subtype(12), 0.0) - std::log(5.0)) < 1e-10);
  CHECK(std::abs(hierarchical_loss(p, label_from_subtype(12), 1.0) - std::log(25.0)) < 1e-10);
}

TEST_CASE("routing and probability validity") {
  Eigen::RowVectorXd tl = Eigen::RowVectorXd::Constant(5, -50.0);
  tl(4) = 50.0;
  auto sub = zero_sub_logits();
  sub[4](3) = 2.0;   // clearance within threat
  sub[3](0) = 10.0;  // strong corner, but set_piece is not the routed type
  const EventPrediction p = make_prediction(tl, sub);
  CHECK(p.type() == 4);
  CHECK(p.subtype() == 13);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Eigen::RowVectorXd t(5);
    for (int k = 0; k < 5; ++k) t(k) = 3 * rng.normal();
    auto s = zero_sub_logits();
    for (auto& v : s)
      for (Index k = 0; k < v.size(); ++k) v(k) = 3 * rng.normal();
    const EventPrediction q = make_prediction(t, s);
    CHECK(std::abs(q.type_probs.sum() - 1) < 1e-10);
    CHECK(std::abs(q.combined.sum() - 1) < 1e-10);
    for (const auto& v : q.subtype_probs) CHECK(std::abs(v.sum() - 1) < 1e-10);
    // Argmax of the combined vector restricted to the argmax type's subtypes.
    const int ty = q.type();
    const int off = model::kSubtypeOffset[static_cast<std::size_t>(ty)];
    Index best = 0;
    q.combined.segment(off, model::subtype_count(ty)).maxCoeff(&best);
    CHECK(q.subtype() == off + best);
  }

  Eigen::RowVectorXd big = Eigen::RowVectorXd::Constant(5, -40.0);
  big(2) = 40.0;
  auto sb = zero_sub_logits();
  const EventPrediction perfect = make_prediction(big, sb);
  CHECK(hierarchical_loss(perfect, label_from_subtype(3)) < 1e-30 + 1e-15);
  CHECK_THROWS(hierarchical_loss(perfect, {1, 5}));
}

TEST_CASE("attention pool examples") {
  Tape tape;
  Matrix h(4, 3);
  h << 1, 2, 3, 4, 5, 6, 7, 8, 9, -1, -1, -1;
  numeric::AttentionGroups g{{{0, 1, 2, 3}}};
  const std::vector<std::uint8_t> vis{1, 1, 0, 1};
  const Var z = numeric::attention_pool(tape.constant(h), tape.constant(Matrix::Zero(4, 1)), g, vis);
  CHECK((z.value().row(0) - (h.row(0) + h.row(1) + h.row(3)) / 3.0).cwiseAbs().maxCoeff() < 1e-15);
  const std::vector<std::uint8_t> one{0, 0, 1, 0};
  const Var z1 = numeric::attention_pool(tape.constant(h), tape.constant(Matrix::Random(4, 1)), g, one);
  CHECK(z1.value().row(0) == h.row(2));
  const std::vector<std::uint8_t> none{0, 0, 0, 0};
  CHECK_THROWS(numeric::attention_pool(tape.constant(h), tape.constant(Matrix::Zero(4, 1)), g, none));
}

TEST_CASE("event model: teacher routing, gradients, grounding") {
  model::Model m = model::Model::create(event_config(), 4);
  Rng rng(5);
  std::vector<model::TokenGrid> grids;
  for (int i = 0; i < 3; ++i) grids.push_back(model::build_token_grid(random_segment(rng, 4 + i, 7), {}, model::Task::event, 0, {.l_max = 6}));
  std::vector<const model::TokenGrid*> ptrs;
  for (auto& g : grids) ptrs.push_back(&g);
  const model::TokenBatch b = model::stack(ptrs);
  const std::vector<EventLabel> labels{label_from_subtype(13), label_from_subtype(1), label_from_subtype(14)};

  m.params().zero_grad();
  {
    Tape tape;
    const EventLogits lg = forward(tape, m, b);
    const Var loss = hierarchical_loss(lg, labels, 1.0);
    // Tape loss agrees with the per-prediction formula.
    const auto preds = predictions(lg);
    double manual = 0;
    for (std::size_t i = 0; i < 3; ++i) manual += hierarchical_loss(preds[i], labels[i], 1.0);
    CHECK(loss.value()(0, 0) == doctest::Approx(manual / 3).epsilon(1e-12));
    tape.backward(loss);
  }
  for (int t : {0, 2, 3}) CHECK(m.params().at("head.sub" + std::to_string(t) + ".w").grad.isZero(0.0));
  CHECK_FALSE(m.params().at("head.sub4.w").grad.isZero(0.0));
  CHECK_FALSE(m.params().at("head.sub1.w").grad.isZero(0.0));

  const auto res = testing::gradient_check(m.params(), [&](Tape& tape) { return hierarchical_loss(forward(tape, m, b), labels, 0.7); });
  INFO("worst " << res.worst);
  CHECK(res.max_rel_error < 1e-4);

  Tape lam0;
  const EventLogits lg0 = forward(lam0, m, b);
  Tape t2;
  CHECK(hierarchical_loss(lg0, labels, 0.0).value()(0, 0) ==
        doctest::Approx(numeric::cross_entropy(forward(t2, m, b).type, std::vector<int>{4, 1, 4}, 3.0).value()(0, 0)).epsilon(1e-14));

  const auto clip = random_segment(rng, 5, 7);
  const EventPrediction a = ground_event(m, clip), c = ground_event(m, clip);
  CHECK(a.combined == c.combined);
  const auto batched = ground_events(m, {clip, random_segment(rng, 9, 7), clip}, 2);
  CHECK(batched[0].combined == a.combined);
  CHECK((batched[2].combined - a.combined).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS(ground_event(m, data::Segment(0, 7)));
}

TEST_CASE("quantiles and forecast summaries") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({0, 10}, 0.1) == doctest::Approx(1.0));
  CHECK_THROWS(quantile({}, 0.5));

  Rng rng(6);
  std::vector<EventPrediction> preds;
  for (int k = 0; k < 20; ++k) {
    Eigen::RowVectorXd t(5);
    for (int i = 0; i < 5; ++i) t(i) = rng.normal();
    preds.push_back(make_prediction(t, zero_sub_logits()));
  }
  const ForecastSummary s = summarize(preds);
  for (int ty = 0; ty < 5; ++ty) {
    std::vector<double> v;
    for (const auto& p : preds) v.push_back(p.type_probs(ty));
    std::sort(v.begin(), v.end());
    // Sorted positions: median between 9 and 10, p10 at 1.9, p90 at 17.1.
    CHECK(s.type[static_cast<std::size_t>(ty)].median == doctest::Approx(0.5 * (v[9] + v[10])).epsilon(1e-15));
    CHECK(s.type[static_cast<std::size_t>(ty)].p10 == doctest::Approx(v[1] + 0.9 * (v[2] - v[1])).epsilon(1e-15));
    CHECK(s.type[static_cast<std::size_t>(ty)].min == v.front());
    CHECK(s.type[static_cast<std::size_t>(ty)].max == v.back());
  }

  const ForecastSummary one = summarize({preds[0]});
  for (const auto& q : one.subtype) {
    CHECK(q.median == q.min);
    CHECK(q.p10 == q.max);
    CHECK(q.p90 == q.median);
  }

  // Constant classifier over a real rollout: zero spread.
  const EventPrediction fixed = preds[3];
  diffusion::RolloutConfig cfg;
  cfg.window = 0.2;
  cfg.history = 0.4;
  cfg.horizon = 0.4;
  cfg.samples = 5;
  ZeroPredictor zp;
  const auto sched = diffusion::Schedule::make(5);
  int seen = 0;
  const ForecastSummary fs = forecast_event(random_segment(rng, 10, 7), nullptr, cfg, 10.0, zp, sched,
                                            [&](const data::Segment& seg) {
                                              CHECK(seg.frames == 3);
                                              ++seen;
                                              return fixed;
                                            },
                                            3);
  CHECK(seen == 5);
  CHECK(zp.calls() == 5 * 2 * 5);
  for (const auto& q : fs.type) CHECK(q.max - q.min == 0.0);
}
