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

#include "gentac/diffusion/diffusion.hpp"
#include "gentac/event/event.hpp"
#include "gentac/model/backbone.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace gentac::train {

using model::Index;
using model::Matrix;

enum class TaskKind { forecast, event };

struct TrainConfig {
  TaskKind task = TaskKind::forecast;
  double lr_peak = 1e-3;
  double weight_decay = 0.01;  // decoupled; forecast task only
  double warmup_ratio = 0.02;
  int epochs = 60;
  int batch_size = 16;
  double grad_clip = 1.0;
  int patience = 35;
  std::uint64_t seed = 0;
  /// Subtype loss weight for the event task.
  double lambda = 1.0;
  /// Per-axis flip probability; event task only.
  double flip_probability = 0.5;
  /// Wall-clock cap in seconds, 0 for none. A capped run is not reproducible.
  double max_seconds = 0.0;

  void validate() const;
};

/// Linear warmup 0 -> lr_peak over warmup_ratio * total steps, then cosine
/// decay to 0 at `total`.
double lr_at(Index step, Index total, const TrainConfig& config);

/// Scales all gradients so their global L2 norm is at most `max_norm`;
/// returns the norm before scaling.
double clip_gradients(numeric::ParameterSet& params, double max_norm);

/// Adam with optional decoupled weight decay (AdamW), betas (0.9, 0.999), eps 1e-8.
class Optimizer {
 public:
  Optimizer(numeric::ParameterSet& params, double weight_decay, double grad_clip);
  /// Clips, then applies one update at learning rate `lr`. Returns the
  /// pre-clip gradient norm.
  double step(double lr);

 private:
  numeric::ParameterSet& params_;
  double weight_decay_;
  double grad_clip_;
  std::vector<Matrix> m_, v_;
  Index t_ = 0;
};

struct ForecastExample {
  model::TokenGrid grid;
  std::string source;
};

struct EventExample {
  data::Segment clip;
  event::EventLabel label;
  std::string source;
};

/// Sliding (history + window)-frame grids over one clip, normalized with the
/// clip's own roster.
std::vector<ForecastExample> forecast_examples(const data::TrajectoryClip& clip, Index history, Index window,
                                               Index stride, model::Task task = model::Task::forecast_joint,
                                               int target_side = 0);
/// Whole clip as one example, label from the metadata subtype.
EventExample event_example(const data::TrajectoryClip& clip);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0;
  double valid_metric = 0;
  double valid_loss = 0;
  double lr = 0;
};

struct TrainResult {
  model::Model best;
  int best_epoch = -1;
  /// Forecast: validation diffusion loss. Event: validation top-1 type accuracy.
  double best_metric = 0;
  double best_loss = 0;
  std::vector<EpochLog> log;
  /// Source ids of every example the loop drew.
  std::set<std::string> touched;
  bool stopped_early = false;
};

/// Validation diffusion loss with a fixed noise stream so epochs compare.
double forecast_validation_loss(model::Model& model, const std::vector<ForecastExample>& valid,
                                const diffusion::Schedule& schedule, std::uint64_t seed, int batch_size = 32);

struct EventValidation {
  double accuracy = 0;
  double loss = 0;
};
EventValidation event_validation(model::Model& model, const std::vector<EventExample>& valid, double lambda,
                                 int batch_size = 32);

/// Trains `model` in place from its current weights and returns the best
/// checkpoint by validation metric.
TrainResult train_forecast(model::Model model, const std::vector<ForecastExample>& train,
                           const std::vector<ForecastExample>& valid, const TrainConfig& config,
                           const diffusion::Schedule& schedule);
TrainResult train_event(model::Model model, const std::vector<EventExample>& train,
                        const std::vector<EventExample>& valid, const TrainConfig& config);

/// Copies the base weights into a fresh model of `expected` config (throws on
/// mismatch) and continues training.
TrainResult finetune_forecast(const model::Model& base, const model::BackboneConfig& expected,
                              const std::vector<ForecastExample>& train, const std::vector<ForecastExample>& valid,
                              const TrainConfig& config, const diffusion::Schedule& schedule);

std::string log_csv(const std::vector<EpochLog>& log);

}  // namespace gentac::train
