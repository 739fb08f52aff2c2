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

#include "gentac/train/trainer.hpp"

#include "gentac/model/checkpoint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gentac::train {

void TrainConfig::validate() const {
  if (!(warmup_ratio >= 0.0 && warmup_ratio < 1.0)) throw std::invalid_argument("warmup_ratio must lie in [0, 1)");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (patience < 0) throw std::invalid_argument("patience must be non-negative");
  if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (!(lr_peak >= 0.0)) throw std::invalid_argument("lr_peak must be non-negative");
}

double lr_at(Index step, Index total, const TrainConfig& config) {
  if (total <= 0) return config.lr_peak;
  step = std::clamp<Index>(step, 0, total);
  const double warm = config.warmup_ratio * static_cast<double>(total);
  const auto s = static_cast<double>(step);
  if (s < warm) return config.lr_peak * s / warm;
  const double span = static_cast<double>(total) - warm;
  if (span <= 0.0) return config.lr_peak;
  const double progress = (s - warm) / span;
  return 0.5 * config.lr_peak * (1.0 + std::cos(M_PI * progress));
}

double clip_gradients(numeric::ParameterSet& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& p : params) p->grad *= scale;
  }
  return norm;
}

Optimizer::Optimizer(numeric::ParameterSet& params, double weight_decay, double grad_clip)
    : params_(params), weight_decay_(weight_decay), grad_clip_(grad_clip) {
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

double Optimizer::step(double lr) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double norm = clip_gradients(params_, grad_clip_);
  ++t_;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  std::size_t i = 0;
  for (auto& p : params_) {
    Matrix& m = m_[i];
    Matrix& v = v_[i];
    ++i;
    m = b1 * m + (1.0 - b1) * p->grad;
    v = b2 * v + (1.0 - b2) * p->grad.cwiseProduct(p->grad);
    const Matrix update = (m / c1).array() / ((v / c2).array().sqrt() + eps);
    if (weight_decay_ != 0.0) p->value -= lr * weight_decay_ * p->value;
    p->value -= lr * update;
  }
  return norm;
}

std::vector<ForecastExample> forecast_examples(const data::TrajectoryClip& clip, Index history, Index window,
                                               Index stride, model::Task task, int target_side) {
  const data::Roster roster = data::Roster::of(clip);
  const Index n = data::count_windows(static_cast<Index>(clip.size()), history, window, stride);
  std::vector<ForecastExample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const data::Window w = data::window(clip, roster, i * stride, history, window);
    out.push_back({model::build_token_grid(w.history, w.future, task, target_side), clip.meta.id});
  }
  return out;
}

EventExample event_example(const data::TrajectoryClip& clip) {
  const auto sub = model::subtype_index(clip.meta.event_subtype);
  if (!sub) throw std::invalid_argument("clip " + clip.meta.id + " has no valid event subtype");
  const data::Roster roster = data::Roster::of(clip);
  return {data::to_segment(clip, roster, 0, static_cast<Index>(clip.size())), event::label_from_subtype(*sub),
          clip.meta.id};
}

double forecast_validation_loss(model::Model& model, const std::vector<ForecastExample>& valid,
                                const diffusion::Schedule& schedule, std::uint64_t seed, int batch_size) {
  if (valid.empty()) throw std::invalid_argument("empty validation split");
  numeric::Rng rng = numeric::Rng(seed).split("valid");
  diffusion::ModelPredictor predictor(model);
  double weighted = 0.0, count = 0.0;
  for (std::size_t start = 0; start < valid.size(); start += static_cast<std::size_t>(batch_size)) {
    std::vector<const model::TokenGrid*> ptrs;
    for (std::size_t i = start; i < std::min(valid.size(), start + static_cast<std::size_t>(batch_size)); ++i)
      ptrs.push_back(&valid[i].grid);
    const diffusion::NoisyBatch nb = diffusion::make_noisy_batch(ptrs, schedule, rng);
    const double slots = nb.batch.noise_weight().sum();
    if (slots == 0.0) continue;
    weighted += diffusion::diffusion_loss_value(predictor, nb) * slots;
    count += slots;
  }
  if (count == 0.0) throw std::invalid_argument("validation split has no target slots");
  return weighted / count;
}

EventValidation event_validation(model::Model& model, const std::vector<EventExample>& valid, double lambda,
                                 int batch_size) {
  if (valid.empty()) throw std::invalid_argument("empty validation split");
  std::vector<data::Segment> clips;
  for (const auto& e : valid) clips.push_back(e.clip);
  const auto preds = event::ground_events(model, clips, batch_size);
  EventValidation v;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    v.accuracy += preds[i].type() == valid[i].label.type ? 1.0 : 0.0;
    v.loss += event::hierarchical_loss(preds[i], valid[i].label, lambda);
  }
  v.accuracy /= static_cast<double>(valid.size());
  v.loss /= static_cast<double>(valid.size());
  return v;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::size_t> shuffled(std::size_t n, numeric::Rng rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);
  return idx;
}

/// Shared epoch loop. `batch_loss` builds the loss for a list of example
/// indices on the given tape; `validate` returns (metric, loss) where a
/// larger metric is better when `maximize`.
template <typename BatchLoss, typename Validate>
TrainResult run(model::Model model, std::size_t n_train, const TrainConfig& config, double weight_decay, bool maximize,
                BatchLoss batch_loss, Validate validate) {
  config.validate();
  if (n_train == 0) throw std::invalid_argument("empty training split");
  TrainResult result;
  result.best = model.clone();
  result.best_metric = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  result.best_loss = std::numeric_limits<double>::infinity();
  Optimizer opt(model.params(), weight_decay, config.grad_clip);
  const auto B = static_cast<std::size_t>(config.batch_size);
  const Index per_epoch = static_cast<Index>((n_train + B - 1) / B);
  const Index total = per_epoch * config.epochs;
  const numeric::Rng root(config.seed);
  const auto started = Clock::now();
  Index step = 0;
  int bad = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = shuffled(n_train, root.split("shuffle").split(static_cast<std::uint64_t>(epoch)));
    numeric::Rng noise = root.split("noise").split(static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    double lr = 0.0;
    for (std::size_t start = 0; start < n_train; start += B) {
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, start + B)));
      model.params().zero_grad();
      numeric::Tape tape;
      const numeric::Var loss = batch_loss(tape, model, idx, noise, result.touched);
      tape.backward(loss);
      lr = lr_at(step, total, config);
      opt.step(lr);
      ++step;
      loss_sum += loss.value()(0, 0);
    }
    const auto [metric, vloss] = validate(model);
    result.log.push_back({epoch, loss_sum / static_cast<double>(per_epoch), metric, vloss, lr});
    const bool better = maximize ? (metric > result.best_metric || (metric == result.best_metric && vloss < result.best_loss))
                                 : metric < result.best_metric;
    if (better) {
      result.best_metric = metric;
      result.best_loss = vloss;
      result.best_epoch = epoch;
      result.best = model.clone();
      bad = 0;
    } else if (++bad >= std::max(1, config.patience)) {
      result.stopped_early = true;
      break;
    }
    if (config.max_seconds > 0.0 &&
        std::chrono::duration<double>(Clock::now() - started).count() > config.max_seconds) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace

TrainResult train_forecast(model::Model model, const std::vector<ForecastExample>& train,
                           const std::vector<ForecastExample>& valid, const TrainConfig& config,
                           const diffusion::Schedule& schedule) {
  if (valid.empty()) throw std::invalid_argument("empty validation split");
  auto batch_loss = [&](numeric::Tape& tape, model::Model& m, const std::vector<std::size_t>& idx, numeric::Rng& rng,
                        std::set<std::string>& touched) {
    std::vector<const model::TokenGrid*> ptrs;
    for (std::size_t i : idx) {
      ptrs.push_back(&train[i].grid);
      touched.insert(train[i].source);
    }
    return diffusion::diffusion_loss(tape, m, diffusion::make_noisy_batch(ptrs, schedule, rng));
  };
  auto validate = [&](model::Model& m) {
    const double l = forecast_validation_loss(m, valid, schedule, config.seed);
    return std::pair{l, l};
  };
  return run(std::move(model), train.size(), config, config.weight_decay, false, batch_loss, validate);
}

TrainResult train_event(model::Model model, const std::vector<EventExample>& train,
                        const std::vector<EventExample>& valid, const TrainConfig& config) {
  if (valid.empty()) throw std::invalid_argument("empty validation split");
  const int l_max = model.config().l_max;
  auto batch_loss = [&](numeric::Tape& tape, model::Model& m, const std::vector<std::size_t>& idx, numeric::Rng& rng,
                        std::set<std::string>& touched) {
    std::vector<model::TokenGrid> grids;
    std::vector<event::EventLabel> labels;
    for (std::size_t i : idx) {
      const data::Segment seg = data::flip_augment(train[i].clip, config.flip_probability, config.flip_probability, rng);
      grids.push_back(model::build_token_grid(seg, {}, model::Task::event, 0, {.l_max = l_max}));
      labels.push_back(train[i].label);
      touched.insert(train[i].source);
    }
    std::vector<const model::TokenGrid*> ptrs;
    for (const auto& g : grids) ptrs.push_back(&g);
    return event::hierarchical_loss(event::forward(tape, m, model::stack(ptrs)), labels, config.lambda);
  };
  auto validate = [&](model::Model& m) {
    const EventValidation v = event_validation(m, valid, config.lambda);
    return std::pair{v.accuracy, v.loss};
  };
  return run(std::move(model), train.size(), config, 0.0, true, batch_loss, validate);
}

TrainResult finetune_forecast(const model::Model& base, const model::BackboneConfig& expected,
                              const std::vector<ForecastExample>& train, const std::vector<ForecastExample>& valid,
                              const TrainConfig& config, const diffusion::Schedule& schedule) {
  model::Model m = model::Model::create(expected, 0);
  model::copy_parameters(base, m);
  return train_forecast(std::move(m), train, valid, config, schedule);
}

std::string log_csv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,valid_metric,valid_loss,lr\n";
  char buf[160];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g\n", e.epoch, e.train_loss, e.valid_metric, e.valid_loss, e.lr);
    out += buf;
  }
  return out;
}

}  // namespace gentac::train
