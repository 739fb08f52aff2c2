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

#include "gentac/diffusion/diffusion.hpp"

#include "gentac/model/taxonomy.hpp"

#include <cmath>
#include <stdexcept>

namespace gentac::diffusion {

Schedule Schedule::make(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw std::invalid_argument("diffusion needs at least one step");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
    throw std::invalid_argument("beta bounds must satisfy 0 < start <= end < 1");
  Schedule sc;
  sc.steps = steps;
  sc.beta.resize(static_cast<std::size_t>(steps));
  sc.alpha_bar.resize(sc.beta.size());
  double prod = 1.0;
  for (int i = 0; i < steps; ++i) {
    const double b = steps == 1 ? beta_start : beta_start + (beta_end - beta_start) * i / (steps - 1);
    sc.beta[static_cast<std::size_t>(i)] = b;
    prod *= 1.0 - b;
    sc.alpha_bar[static_cast<std::size_t>(i)] = prod;
  }
  return sc;
}

namespace {

void check_step(int s, const Schedule& schedule) {
  if (s < 1 || s > schedule.steps)
    throw std::out_of_range("diffusion step " + std::to_string(s) + " outside [1, " + std::to_string(schedule.steps) + "]");
}

Matrix normal_like(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

Matrix forward_noise(const Matrix& x_f, int s, const Schedule& schedule, const Matrix& epsilon) {
  check_step(s, schedule);
  const double ab = schedule.alpha_bar_at(s);
  return std::sqrt(ab) * x_f + std::sqrt(1.0 - ab) * epsilon;
}

Noised forward_noise(const Matrix& x_f, int s, const Schedule& schedule, Rng& rng) {
  check_step(s, schedule);
  Matrix eps = normal_like(x_f.rows(), x_f.cols(), rng);
  Matrix x = forward_noise(x_f, s, schedule, eps);
  return {std::move(x), std::move(eps)};
}

Matrix denoise_step(const Matrix& x_s, const Matrix& eps_hat, int s, const Schedule& schedule, const Matrix& z) {
  check_step(s, schedule);
  const double b = schedule.beta_at(s), ab = schedule.alpha_bar_at(s);
  Matrix out = (x_s - (b / std::sqrt(1.0 - ab)) * eps_hat) / std::sqrt(1.0 - b);
  if (s > 1) out += std::sqrt(b) * z;
  return out;
}

Matrix denoise_step(const Matrix& x_s, const Matrix& eps_hat, int s, const Schedule& schedule, Rng& rng,
                    Sampler sampler) {
  check_step(s, schedule);
  if (sampler == Sampler::ddim) {
    const double ab = schedule.alpha_bar_at(s), ab_prev = schedule.alpha_bar_at(s - 1);
    const Matrix x0 = (x_s - std::sqrt(1.0 - ab) * eps_hat) / std::sqrt(ab);
    return std::sqrt(ab_prev) * x0 + std::sqrt(1.0 - ab_prev) * eps_hat;
  }
  const Matrix z = s > 1 ? normal_like(x_s.rows(), x_s.cols(), rng) : Matrix::Zero(x_s.rows(), x_s.cols());
  return denoise_step(x_s, eps_hat, s, schedule, z);
}

Matrix ModelPredictor::predict(const TokenBatch& batch) {
  numeric::Tape tape;
  return model::noise_head(tape, model_, model::encode(tape, model_, batch)).value();
}

NoisyBatch make_noisy_batch(const std::vector<const TokenGrid*>& grids, const Schedule& schedule, Rng& rng) {
  std::vector<int> steps(grids.size());
  for (auto& s : steps) s = static_cast<int>(rng.uniform_int(1, schedule.steps));
  NoisyBatch nb{model::stack(grids, steps), Matrix()};
  TokenBatch& b = nb.batch;
  nb.epsilon = Matrix::Zero(b.rows(), 2);
  const Index per = b.frames * b.entities;
  for (Index r = 0; r < b.rows(); ++r) {
    if (!b.noise_target[static_cast<std::size_t>(r)]) continue;
    const int s = steps[static_cast<std::size_t>(r / per)];
    nb.epsilon(r, 0) = rng.normal();
    nb.epsilon(r, 1) = rng.normal();
    const double ab = schedule.alpha_bar_at(s);
    b.coords.row(r) = std::sqrt(ab) * b.coords.row(r) + std::sqrt(1.0 - ab) * nb.epsilon.row(r);
  }
  return nb;
}

numeric::Var diffusion_loss(numeric::Tape& tape, model::Model& model, const NoisyBatch& noisy) {
  const numeric::Var pred = model::noise_head(tape, model, model::encode(tape, model, noisy.batch));
  return numeric::weighted_mse(pred, noisy.epsilon, noisy.batch.noise_weight());
}

double diffusion_loss_value(NoisePredictor& predictor, const NoisyBatch& noisy) {
  const Matrix pred = predictor(noisy.batch);
  const Matrix w = noisy.batch.noise_weight();
  const double denom = w.sum();
  if (denom == 0.0) throw std::invalid_argument("batch has no noise-target slots");
  return (w.array() * (pred - noisy.epsilon).array().square()).sum() / denom;
}

std::string to_string(Setting s) {
  switch (s) {
    case Setting::unconditioned: return "unconditioned";
    case Setting::opponent: return "opponent";
    case Setting::team: return "team";
    case Setting::league: return "league";
    case Setting::objective: return "objective";
  }
  return "unconditioned";
}

Setting setting_from_string(const std::string& s) {
  for (Setting v : {Setting::unconditioned, Setting::opponent, Setting::team, Setting::league, Setting::objective})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown setting " + s);
}

bool is_single_team(Setting s) { return s == Setting::opponent || s == Setting::team; }

Index to_frames(double seconds, double fps) {
  const double exact = seconds * fps;
  const double rounded = std::round(exact);
  if (std::abs(exact - rounded) > 0.4)
    throw std::invalid_argument(std::to_string(seconds) + " s is not a whole number of frames at " + std::to_string(fps) + " fps");
  return static_cast<Index>(rounded);
}

FrameCounts frame_counts(const RolloutConfig& config, double fps) {
  FrameCounts c;
  c.window = to_frames(config.window, fps);
  c.history = to_frames(config.history, fps);
  const Index horizon = to_frames(config.horizon, fps);
  if (c.window <= 0) throw std::invalid_argument("window must span at least one frame");
  if (horizon % c.window != 0) throw std::invalid_argument("horizon is not a multiple of the window");
  if (config.samples < 1) throw std::invalid_argument("need at least one sample");
  c.windows = horizon / c.window;
  return c;
}

Segment carry_visibility(const Segment& history, Index frames) {
  Segment s(frames, history.entities);
  if (history.frames > 0)
    for (Index t = 0; t < frames; ++t) s.visible.row(t) = history.visible.row(history.frames - 1);
  return s;
}

std::vector<Segment> sample_window(const SampleRequest& request, NoisePredictor& predictor, const Schedule& schedule,
                                   std::vector<Rng>& rngs) {
  const std::size_t K = request.histories.size();
  if (K == 0 || request.futures.size() != K || rngs.size() != K)
    throw std::invalid_argument("sample_window needs one history, future and rng per sample");
  std::vector<TokenGrid> grids;
  grids.reserve(K);
  for (std::size_t k = 0; k < K; ++k)
    grids.push_back(model::build_token_grid(request.histories[k], request.futures[k], request.task, request.target_side,
                                            {.ball_is_target = request.ball_is_target}));
  std::vector<const TokenGrid*> ptrs;
  for (const auto& g : grids) ptrs.push_back(&g);
  TokenBatch batch = model::stack(ptrs, std::vector<int>(K, schedule.steps));

  const Index per = batch.frames * batch.entities;
  std::vector<std::vector<Index>> rows(K);
  for (std::size_t k = 0; k < K; ++k)
    for (Index r = 0; r < per; ++r)
      if (batch.noise_target[static_cast<std::size_t>(static_cast<Index>(k) * per + r)])
        rows[k].push_back(static_cast<Index>(k) * per + r);

  // Pure Gaussian start on target slots only.
  for (std::size_t k = 0; k < K; ++k)
    for (Index r : rows[k]) {
      batch.coords(r, 0) = rngs[k].normal();
      batch.coords(r, 1) = rngs[k].normal();
    }

  for (int s = schedule.steps; s >= 1; --s) {
    std::fill(batch.steps.begin(), batch.steps.end(), s);
    const Matrix eps = predictor(batch);
    for (std::size_t k = 0; k < K; ++k) {
      if (rows[k].empty()) continue;
      const Matrix x = batch.coords(rows[k], Eigen::all);
      const Matrix e = eps(rows[k], Eigen::all);
      batch.coords(rows[k], Eigen::all) = denoise_step(x, e, s, schedule, rngs[k], request.sampler);
    }
  }

  std::vector<Segment> out;
  out.reserve(K);
  const Index h = grids[0].history_frames, w = grids[0].frames - h;
  for (std::size_t k = 0; k < K; ++k) {
    Segment seg(w, batch.entities);
    seg.coords = batch.coords.middleRows(static_cast<Index>(k) * per + h * batch.entities, w * batch.entities);
    seg.visible = grids[k].visible.bottomRows(w);
    out.push_back(std::move(seg));
  }
  return out;
}

FutureSampleSet rollout(const Segment& history, const Segment* truth_future, const RolloutConfig& config, double fps,
                        NoisePredictor& predictor, const Schedule& schedule) {
  const FrameCounts fc = frame_counts(config, fps);
  if (history.frames < fc.history)
    throw std::invalid_argument("history has " + std::to_string(history.frames) + " frames, need " + std::to_string(fc.history));
  const bool single = is_single_team(config.setting);
  if (single && !truth_future) throw std::invalid_argument("single-team rollout needs the opponent's future");
  if (truth_future && truth_future->frames < fc.windows * fc.window)
    throw std::invalid_argument("conditioning future shorter than the horizon");

  const auto K = static_cast<std::size_t>(config.samples);
  FutureSampleSet set;
  std::vector<Rng> rngs;
  const Rng root(config.seed);
  for (std::size_t k = 0; k < K; ++k) {
    rngs.push_back(root.split(static_cast<std::uint64_t>(k)));
    set.seeds.push_back(rngs.back().key());
  }

  const Segment start = history.slice(history.frames - fc.history, fc.history);
  std::vector<Segment> hist(K, start);
  set.samples.assign(K, Segment(0, history.entities));
  SampleRequest req;
  req.task = single ? model::Task::forecast_single : model::Task::forecast_joint;
  req.target_side = config.target_side;
  req.ball_is_target = config.ball_is_target;
  req.sampler = config.sampler;
  for (Index j = 0; j < fc.windows; ++j) {
    req.histories = hist;
    req.futures.clear();
    for (std::size_t k = 0; k < K; ++k)
      req.futures.push_back(truth_future ? truth_future->slice(j * fc.window, fc.window)
                                         : carry_visibility(hist[k], fc.window));
    const std::vector<Segment> out = sample_window(req, predictor, schedule, rngs);
    for (std::size_t k = 0; k < K; ++k) {
      set.samples[k] = Segment::concat(set.samples[k], out[k]);
      const Segment joined = Segment::concat(hist[k], out[k]);
      hist[k] = joined.slice(joined.frames - fc.history, fc.history);
    }
  }
  return set;
}

std::vector<const data::TrajectoryClip*> condition_tagging(const std::vector<data::TrajectoryClip>& clips,
                                                           Setting setting, const std::string& value) {
  std::vector<const data::TrajectoryClip*> out;
  for (const auto& c : clips) {
    bool keep = true;
    switch (setting) {
      case Setting::team: keep = c.meta.team == value; break;
      case Setting::league: keep = c.meta.league == value; break;
      case Setting::objective:
        if (value == "offense") keep = model::is_offense_subtype(c.meta.event_subtype);
        else if (value == "defense") keep = model::is_defense_subtype(c.meta.event_subtype);
        else throw std::invalid_argument("objective must be offense or defense");
        break;
      default: break;
    }
    if (keep) out.push_back(&c);
  }
  if (out.empty()) throw std::invalid_argument("no clips match " + to_string(setting) + " = " + value);
  return out;
}

}  // namespace gentac::diffusion
