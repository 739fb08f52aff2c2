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

#include "gentac/diffusion/diffusion.hpp"

#include <cmath>

using namespace gentac;
using namespace gentac::diffusion;

namespace {

class ZeroPredictor : public NoisePredictor {
 protected:
  Matrix predict(const TokenBatch& b) override { return Matrix::Zero(b.rows(), 2); }
};

/// Returns the epsilon a NoisyBatch was built with.
class OraclePredictor : public NoisePredictor {
 public:
  explicit OraclePredictor(Matrix eps) : eps_(std::move(eps)) {}

 protected:
  Matrix predict(const TokenBatch&) override { return eps_; }

 private:
  Matrix eps_;
};

/// Records every non-target coordinate it sees.
class RecordingPredictor : public NoisePredictor {
 public:
  std::vector<Matrix> frozen;
  std::vector<int> steps;

 protected:
  Matrix predict(const TokenBatch& b) override {
    Matrix m = b.coords;
    for (Index r = 0; r < b.rows(); ++r)
      if (b.noise_target[static_cast<std::size_t>(r)]) m.row(r).setConstant(std::nan(""));
    frozen.push_back(m);
    steps.push_back(b.steps.front());
    return Matrix::Constant(b.rows(), 2, 0.1);
  }
};

data::Segment random_segment(Rng& rng, Index frames, Index entities) {
  data::Segment s(frames, entities);
  for (Index t = 0; t < frames; ++t)
    for (Index e = 0; e < entities; ++e) s.set(t, e, data::Vec2(2 * rng.uniform() - 1, 2 * rng.uniform() - 1));
  return s;
}

bool same_frozen(const Matrix& a, const Matrix& b) {
  for (Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    if (std::isnan(x) != std::isnan(y)) return false;
    if (!std::isnan(x) && x != y) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("make_schedule") {
  const Schedule one = Schedule::make(1, 0.01, 0.02);
  REQUIRE(one.alpha_bar.size() == 1);
  CHECK(one.alpha_bar[0] == doctest::Approx(0.99).epsilon(1e-15));

  const Schedule flat = Schedule::make(50, 0.03, 0.03);
  for (int s = 1; s <= 50; ++s) CHECK(flat.alpha_bar_at(s) == doctest::Approx(std::pow(0.97, s)).epsilon(1e-12));

  const Schedule sc = Schedule::make(100);
  CHECK(sc.beta_at(1) == 1e-4);
  CHECK(sc.beta_at(100) == doctest::Approx(0.02).epsilon(1e-15));
  // Running-product oracle with betas recomputed from the endpoints.
  double prod = 1.0;
  for (int r = 1; r <= 100; ++r) prod *= 1.0 - (1e-4 + (0.02 - 1e-4) * (r - 1) / 99.0);
  CHECK(std::abs(sc.alpha_bar_at(100) - prod) < 1e-15);
  CHECK(sc.alpha_bar_at(100) == doctest::Approx(0.3641).epsilon(1e-3));
  for (int s = 2; s <= 100; ++s) {
    CHECK(sc.alpha_bar_at(s) < sc.alpha_bar_at(s - 1));
    CHECK(sc.beta_at(s) > 0.0);
    CHECK(sc.beta_at(s) < 1.0);
  }
  CHECK_THROWS(Schedule::make(0));
  CHECK_THROWS(Schedule::make(10, 0.0, 0.02));
  CHECK_THROWS(Schedule::make(10, 0.03, 0.02));
  CHECK_THROWS(Schedule::make(10, 0.01, 1.0));
}

TEST_CASE("forward_noise") {
  const Schedule sc = Schedule::make(100);
  Matrix x(3, 2);
  x << 0.5, -0.2, 0.1, 0.9, -1.0, 0.0;
  const Matrix zero = Matrix::Zero(3, 2);
  CHECK(forward_noise(x, 40, sc, zero) == std::sqrt(sc.alpha_bar_at(40)) * x);
  Rng rng(1);
  const Noised n = forward_noise(zero, 70, sc, rng);
  CHECK(n.x_s == std::sqrt(1 - sc.alpha_bar_at(70)) * n.epsilon);
  CHECK_THROWS(forward_noise(x, 0, sc, zero));
  CHECK_THROWS(forward_noise(x, 101, sc, zero));

  // Monte-Carlo marginal.
  const int draws = 10000;
  for (int s : {1, 50, 100}) {
    Matrix sum = Matrix::Zero(3, 2), sq = Matrix::Zero(3, 2);
    for (int i = 0; i < draws; ++i) {
      const Noised d = forward_noise(x, s, sc, rng);
      sum += d.x_s;
      sq += d.x_s.cwiseProduct(d.x_s);
    }
    const Matrix mean = sum / draws;
    const Matrix var = sq / draws - mean.cwiseProduct(mean);
    const double v = 1 - sc.alpha_bar_at(s);
    const double sigma = std::sqrt(v / draws);
    CHECK(((mean - std::sqrt(sc.alpha_bar_at(s)) * x).cwiseAbs().array() <= 3 * sigma).all());
    CHECK(((var.array() / v) - 1.0).abs().maxCoeff() < 0.05);
  }
}

TEST_CASE("denoise_step reductions") {
  const Schedule sc = Schedule::make(100);
  Matrix x(2, 2);
  x << 0.3, -0.4, 1.2, 0.5;
  const Matrix zero = Matrix::Zero(2, 2);
  CHECK(denoise_step(x, zero, 37, sc, zero) == x / std::sqrt(1 - sc.beta_at(37)));
  Rng a(3), b(4);
  const Matrix e = Matrix::Constant(2, 2, 0.7);
  CHECK(denoise_step(x, e, 1, sc, a) == denoise_step(x, e, 1, sc, b));
  CHECK(denoise_step(x, e, 2, sc, a) != denoise_step(x, e, 2, sc, b));
  // Explicit formula at s = 1.
  const double b1 = sc.beta_at(1), ab1 = sc.alpha_bar_at(1);
  CHECK((denoise_step(x, e, 1, sc, a) - (x - b1 / std::sqrt(1 - ab1) * e) / std::sqrt(1 - b1)).cwiseAbs().maxCoeff() < 1e-15);
  // DDIM with the true epsilon returns the noiseless point at s = 1.
  const Matrix x0 = Matrix::Constant(2, 2, 0.25);
  const Matrix xs = forward_noise(x0, 1, sc, e);
  CHECK((denoise_step(xs, e, 1, sc, a, Sampler::ddim) - x0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("oracle sampler on a scalar toy") {
  // With eps_hat recomputed from the current state as the exact noise that
  // links x_s to x_0, the ancestral chain lands on x_0 for every S.
  Rng rng(5);
  for (int S : {10, 100, 1000}) {
    const Schedule sc = Schedule::make(S);
    double mse = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const double x0 = 2 * rng.uniform() - 1;
      Matrix x(1, 1);
      x(0, 0) = rng.normal();
      for (int s = S; s >= 1; --s) {
        Matrix eps(1, 1);
        eps(0, 0) = (x(0, 0) - std::sqrt(sc.alpha_bar_at(s)) * x0) / std::sqrt(1 - sc.alpha_bar_at(s));
        x = denoise_step(x, eps, s, sc, rng);
      }
      mse += (x(0, 0) - x0) * (x(0, 0) - x0);
    }
    CHECK(mse / 200 < 1e-20);
  }
}

TEST_CASE("diffusion loss with stub predictors") {
  const Schedule sc = Schedule::make(100);
  Rng rng(6);
  std::vector<TokenGrid> grids;
  for (int i = 0; i < 8; ++i)
    grids.push_back(model::build_token_grid(random_segment(rng, 6, 7), random_segment(rng, 3, 7), model::Task::forecast_joint));
  std::vector<const TokenGrid*> ptrs;
  for (auto& g : grids) ptrs.push_back(&g);
  const NoisyBatch nb = make_noisy_batch(ptrs, sc, rng);
  CHECK(nb.batch.steps.size() == 8);
  for (int s : nb.batch.steps) CHECK((s >= 1 && s <= 100));
  // Conditioning rows are untouched, target rows are noised.
  const Index per = 9 * 7;
  CHECK(nb.batch.coords.row(0) == grids[0].coords.row(0));
  CHECK(nb.batch.coords.row(per + 6 * 7) != grids[1].coords.row(6 * 7));
  CHECK(nb.epsilon.row(0).isZero());

  OraclePredictor oracle(nb.epsilon);
  CHECK(diffusion_loss_value(oracle, nb) == 0.0);
  ZeroPredictor zero;
  const double l = diffusion_loss_value(zero, nb);
  CHECK(l == doctest::Approx(1.0).epsilon(0.12));
  CHECK(zero.calls() == 8);

  {
    model::BackboneConfig cfg = model::BackboneConfig::desk(3);
    cfg.l_max = 16;
    model::Model m = model::Model::create(cfg, 1);
    numeric::Tape tape;
    const double tape_loss = diffusion_loss(tape, m, nb).value()(0, 0);
    ModelPredictor mp(m);
    CHECK(tape_loss == doctest::Approx(diffusion_loss_value(mp, nb)).epsilon(1e-12));
    CHECK(tape_loss > 0.5);
    CHECK(tape_loss < 2.0);
  }
}

TEST_CASE("sample_window freezes conditioning") {
  const Schedule sc = Schedule::make(20);
  Rng rng(7);
  SampleRequest req;
  for (int k = 0; k < 3; ++k) {
    req.histories.push_back(random_segment(rng, 5, 7));
    req.futures.push_back(random_segment(rng, 2, 7));
  }
  req.task = model::Task::forecast_single;
  req.target_side = 1;
  std::vector<Rng> rngs{Rng(1), Rng(2), Rng(3)};
  RecordingPredictor rec;
  const auto out = sample_window(req, rec, sc, rngs);
  CHECK(rec.calls() == 3 * 20);
  REQUIRE(rec.frozen.size() == 20);
  for (std::size_t i = 0; i < rec.frozen.size(); ++i) {
    CHECK(same_frozen(rec.frozen[i], rec.frozen[0]));
    CHECK(rec.steps[i] == 20 - static_cast<int>(i));
  }
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(out[k].frames == 2);
    CHECK(out[k].coords.allFinite());
    for (Index t = 0; t < 2; ++t)
      for (Index e = 0; e < 7; ++e) {
        const bool target = e >= 3 && e < 6;
        if (!target) CHECK(out[k].coords.row(t * 7 + e) == req.futures[k].coords.row(t * 7 + e));
        else CHECK(out[k].coords.row(t * 7 + e) != req.futures[k].coords.row(t * 7 + e));
      }
  }
}

TEST_CASE("rollout windows, call counts and determinism") {
  const Schedule sc = Schedule::make(10);
  Rng rng(8);
  const auto history = random_segment(rng, 30, 7);
  const auto truth = random_segment(rng, 25, 7);
  RolloutConfig cfg;
  cfg.window = 0.2;
  cfg.history = 1.0;
  cfg.horizon = 1.0;
  cfg.samples = 4;
  cfg.seed = 99;
  const FrameCounts fc = frame_counts(cfg, 25.0);
  CHECK(fc.window == 5);
  CHECK(fc.history == 25);
  CHECK(fc.windows == 5);

  RecordingPredictor rec;
  cfg.setting = Setting::opponent;
  const FutureSampleSet set = rollout(history, &truth, cfg, 25.0, rec, sc);
  CHECK(rec.calls() == 4 * 5 * 10);
  REQUIRE(set.samples.size() == 4);
  for (const auto& s : set.samples) {
    CHECK(s.frames == 25);
    // Opponent and ball carry the truth bit-for-bit.
    for (Index t = 0; t < 25; ++t)
      for (Index e : {3, 4, 5, 6}) CHECK(s.coords.row(t * 7 + e) == truth.coords.row(t * 7 + e));
  }
  CHECK(set.samples[0].coords != set.samples[1].coords);
  CHECK(set.seeds[0] != set.seeds[1]);

  ZeroPredictor z1, z2;
  const auto a = rollout(history, &truth, cfg, 25.0, z1, sc);
  const auto b = rollout(history, &truth, cfg, 25.0, z2, sc);
  for (std::size_t k = 0; k < 4; ++k) CHECK(a.samples[k].coords == b.samples[k].coords);

  // Zero-noise sampler stub: deterministic DDIM with a zero predictor.
  cfg.samples = 1;
  cfg.setting = Setting::unconditioned;
  cfg.sampler = Sampler::ddim;
  cfg.seed = 1;
  const auto d1 = rollout(history, nullptr, cfg, 25.0, z1, sc);
  cfg.seed = 2;
  const auto d2 = rollout(history, nullptr, cfg, 25.0, z1, sc);
  CHECK(d1.samples[0].frames == 25);
  CHECK(d1.samples[0].coords != d2.samples[0].coords);  // start noise still differs by seed

  cfg.horizon = 0.5;
  cfg.window = 0.2;
  CHECK_THROWS(frame_counts(cfg, 25.0));
  cfg.window = 0.21;
  CHECK_THROWS(to_frames(0.25, 10.0));
  CHECK(to_frames(0.21, 10.0) == 2);
  CHECK(to_frames(0.2, 25.0) == 5);
  cfg = RolloutConfig{};
  cfg.setting = Setting::team;
  CHECK_THROWS(rollout(history, nullptr, cfg, 25.0, z1, sc));
}

TEST_CASE("condition_tagging") {
  std::vector<data::TrajectoryClip> clips(5);
  clips[0].meta = {"a", "Auckland", "A-League", "threat", "goal"};
  clips[1].meta = {"b", "Sydney", "A-League", "threat", "clearance"};
  clips[2].meta = {"c", "Bayern", "Bundesliga", "threat", "shot_saved"};
  clips[3].meta = {"d", "Bayern", "Bundesliga", "build", "build"};
  clips[4].meta = {"e", "Auckland", "A-League", "threat", "defended"};
  CHECK(condition_tagging(clips, Setting::league, "A-League").size() == 3);
  const auto off = condition_tagging(clips, Setting::objective, "offense");
  REQUIRE(off.size() == 2);
  CHECK(off[0]->meta.id == "a");
  CHECK(off[1]->meta.id == "c");
  CHECK(condition_tagging(clips, Setting::objective, "defense").size() == 2);
  CHECK(condition_tagging(clips, Setting::team, "Bayern").size() == 2);
  CHECK(condition_tagging(clips, Setting::unconditioned, "").size() == 5);
  CHECK_THROWS(condition_tagging(clips, Setting::team, "Nobody"));
  CHECK_THROWS(condition_tagging(clips, Setting::objective, "midfield"));
  CHECK(setting_from_string("league") == Setting::league);
  CHECK(is_single_team(Setting::opponent));
  CHECK_FALSE(is_single_team(Setting::league));
}
