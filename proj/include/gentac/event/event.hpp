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
#include "gentac/model/backbone.hpp"
#include "gentac/model/taxonomy.hpp"

#include <array>
#include <functional>
#include <vector>

namespace gentac::event {

using model::Index;
using model::Matrix;
using numeric::Tape;
using numeric::Var;

using TypeVector = Eigen::Matrix<double, 1, model::kTypeCount>;
using SubtypeVector = Eigen::Matrix<double, 1, model::kSubtypeCount>;

struct EventLabel {
  int type = 0;
  int subtype = 0;  // global index 0..14
};
EventLabel label_from_subtype(int subtype);

struct EventPrediction {
  TypeVector type_probs = TypeVector::Zero();
  /// subtype_probs[t] has subtype_count(t) entries.
  std::array<Eigen::RowVectorXd, model::kTypeCount> subtype_probs;
  /// p(type) * p(subtype | type), global subtype order.
  SubtypeVector combined = SubtypeVector::Zero();

  /// argmax type.
  int type() const;
  /// Global subtype index routed through the argmax type's head.
  int subtype() const;
};

/// Builds a prediction from raw logits (1 x 5 and the five per-type rows).
EventPrediction make_prediction(const Eigen::RowVectorXd& type_logits,
                                const std::array<Eigen::RowVectorXd, model::kTypeCount>& sub_logits);

struct EventLogits {
  Var type;                                   // B x 5
  std::array<Var, model::kTypeCount> sub;     // B x subtype_count(t)
};

/// Softmax pooling over each sample's visible tokens with a tanh score MLP.
Var attention_pool(Tape& tape, model::Model& model, Var h, const model::TokenBatch& batch);
EventLogits classify(Tape& tape, model::Model& model, Var z);
/// encode -> pool -> classify.
EventLogits forward(Tape& tape, model::Model& model, const model::TokenBatch& batch);
std::vector<EventPrediction> predictions(const EventLogits& logits);

/// Mean over the batch of CE(type) + lambda * CE(true type's subtype head).
/// Other subtype heads receive no gradient from a sample.
Var hierarchical_loss(const EventLogits& logits, const std::vector<EventLabel>& labels, double lambda = 1.0);
/// Same quantity on a finished prediction.
double hierarchical_loss(const EventPrediction& p, const EventLabel& label, double lambda = 1.0);

/// Pads or truncates to the model's l_max and classifies.
EventPrediction ground_event(model::Model& model, const data::Segment& clip);
std::vector<EventPrediction> ground_events(model::Model& model, const std::vector<data::Segment>& clips,
                                           Index batch_size = 32);

struct Quantiles {
  double median = 0, p10 = 0, p90 = 0, min = 0, max = 0;
};
/// Linear-interpolation quantile on sorted data: position q * (n - 1), with q
/// resolved to six decimals.
double quantile(std::vector<double> values, double q);
Quantiles summarize(const std::vector<double>& values);

struct ForecastSummary {
  std::vector<EventPrediction> samples;
  std::array<Quantiles, model::kTypeCount> type;
  std::array<Quantiles, model::kSubtypeCount> subtype;
};

using Classifier = std::function<EventPrediction(const data::Segment&)>;

/// Per-type and per-subtype box statistics over a set of predictions.
ForecastSummary summarize(std::vector<EventPrediction> samples);

/// Rolls out K futures, classifies the last `event_frames` frames of each and
/// summarizes the K predictions.
ForecastSummary forecast_event(const data::Segment& history, const data::Segment* truth_future,
                               const diffusion::RolloutConfig& config, double fps,
                               diffusion::NoisePredictor& predictor, const diffusion::Schedule& schedule,
                               const Classifier& classifier, Index event_frames = 100);

}  // namespace gentac::event
