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

#include "gentac/event/event.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gentac::event {

using model::kSubtypeOffset;
using model::kTypeCount;
using model::subtype_count;

namespace {

Eigen::RowVectorXd softmax(const Eigen::RowVectorXd& logits) {
  const Eigen::RowVectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

Var linear(Tape& tape, model::Model& m, const std::string& name, Var x) {
  return numeric::add_row(numeric::matmul(x, tape.param(m.params().at(name + ".w"))), tape.param(m.params().at(name + ".b")));
}

Index argmax(const Eigen::RowVectorXd& v) {
  Index i = 0;
  v.maxCoeff(&i);
  return i;
}

}  // namespace

EventLabel label_from_subtype(int subtype) {
  if (subtype < 0 || subtype >= model::kSubtypeCount) throw std::invalid_argument("subtype index out of range");
  return {model::type_of_subtype(subtype), subtype};
}

int EventPrediction::type() const { return static_cast<int>(argmax(type_probs)); }

int EventPrediction::subtype() const {
  const int t = type();
  return kSubtypeOffset[static_cast<std::size_t>(t)] + static_cast<int>(argmax(subtype_probs[static_cast<std::size_t>(t)]));
}

EventPrediction make_prediction(const Eigen::RowVectorXd& type_logits,
                                const std::array<Eigen::RowVectorXd, kTypeCount>& sub_logits) {
  EventPrediction p;
  p.type_probs = softmax(type_logits);
  for (int t = 0; t < kTypeCount; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (sub_logits[ti].size() != subtype_count(t)) throw std::invalid_argument("subtype head size mismatch");
    p.subtype_probs[ti] = softmax(sub_logits[ti]);
    for (int j = 0; j < subtype_count(t); ++j) p.combined(kSubtypeOffset[ti] + j) = p.type_probs(t) * p.subtype_probs[ti](j);
  }
  return p;
}

Var attention_pool(Tape& tape, model::Model& m, Var h, const model::TokenBatch& batch) {
  numeric::AttentionGroups groups;
  const Index per = batch.frames * batch.entities;
  for (Index s = 0; s < batch.samples; ++s) {
    std::vector<Index> rows(static_cast<std::size_t>(per));
    for (Index r = 0; r < per; ++r) rows[static_cast<std::size_t>(r)] = s * per + r;
    groups.members.push_back(std::move(rows));
  }
  const Var scores = numeric::matmul(numeric::tanh(linear(tape, m, "pool.hidden", h)), tape.param(m.params().at("pool.score")));
  return numeric::attention_pool(h, scores, groups, batch.visible);
}

EventLogits classify(Tape& tape, model::Model& m, Var z) {
  EventLogits out;
  out.type = linear(tape, m, "head.type", z);
  for (int t = 0; t < kTypeCount; ++t) out.sub[static_cast<std::size_t>(t)] = linear(tape, m, "head.sub" + std::to_string(t), z);
  return out;
}

EventLogits forward(Tape& tape, model::Model& m, const model::TokenBatch& batch) {
  if (m.config().head != model::HeadKind::event) throw std::invalid_argument("model has no event head");
  const Var h = model::encode(tape, m, batch);
  const Var hn = numeric::layer_norm_rows(h, tape.param(m.params().at("head.ln.g")), tape.param(m.params().at("head.ln.b")), 1e-5);
  return classify(tape, m, attention_pool(tape, m, hn, batch));
}

std::vector<EventPrediction> predictions(const EventLogits& logits) {
  const Matrix& tl = logits.type.value();
  std::vector<EventPrediction> out;
  for (Index b = 0; b < tl.rows(); ++b) {
    std::array<Eigen::RowVectorXd, kTypeCount> sub;
    for (std::size_t t = 0; t < sub.size(); ++t) sub[t] = logits.sub[t].value().row(b);
    out.push_back(make_prediction(tl.row(b), sub));
  }
  return out;
}

Var hierarchical_loss(const EventLogits& logits, const std::vector<EventLabel>& labels, double lambda) {
  const auto B = static_cast<double>(labels.size());
  if (labels.empty() || static_cast<Index>(labels.size()) != logits.type.rows())
    throw std::invalid_argument("one label per sample");
  std::vector<int> types;
  for (const auto& l : labels) {
    if (l.type < 0 || l.type >= kTypeCount || model::type_of_subtype(l.subtype) != l.type)
      throw std::invalid_argument("label does not match the taxonomy");
    types.push_back(l.type);
  }
  Var loss = numeric::cross_entropy(logits.type, types, B);
  if (lambda == 0.0) return loss;
  for (int t = 0; t < kTypeCount; ++t) {
    std::vector<int> local;
    bool any = false;
    for (const auto& l : labels) {
      local.push_back(l.type == t ? l.subtype - kSubtypeOffset[static_cast<std::size_t>(t)] : -1);
      any = any || l.type == t;
    }
    if (any) loss = loss + numeric::scale(numeric::cross_entropy(logits.sub[static_cast<std::size_t>(t)], local, B), lambda);
  }
  return loss;
}

double hierarchical_loss(const EventPrediction& p, const EventLabel& label, double lambda) {
  if (label.type < 0 || label.type >= kTypeCount || model::type_of_subtype(label.subtype) != label.type)
    throw std::invalid_argument("label does not match the taxonomy");
  const auto t = static_cast<std::size_t>(label.type);
  return -std::log(p.type_probs(label.type)) -
         lambda * std::log(p.subtype_probs[t](label.subtype - kSubtypeOffset[t]));
}

std::vector<EventPrediction> ground_events(model::Model& m, const std::vector<data::Segment>& clips, Index batch_size) {
  std::vector<EventPrediction> out;
  for (std::size_t start = 0; start < clips.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(clips.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<model::TokenGrid> grids;
    for (std::size_t i = start; i < end; ++i) {
      if (clips[i].frames == 0) throw std::invalid_argument("empty clip");
      grids.push_back(model::build_token_grid(clips[i], {}, model::Task::event, 0, {.l_max = m.config().l_max}));
    }
    std::vector<const model::TokenGrid*> ptrs;
    for (const auto& g : grids) ptrs.push_back(&g);
    Tape tape;
    const auto preds = predictions(forward(tape, m, model::stack(ptrs)));
    out.insert(out.end(), preds.begin(), preds.end());
  }
  return out;
}

EventPrediction ground_event(model::Model& m, const data::Segment& clip) { return ground_events(m, {clip}).front(); }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  // Position in integer millionths so decimal levels land exactly: at n = 20,
  // q = 0.1 gives rank 1 and fraction 0.9, not 0.9000000000000001.
  constexpr long long kScale = 1000000;
  const long long num = std::llround(q * kScale) * static_cast<long long>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(num / kScale);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = static_cast<double>(num % kScale) / static_cast<double>(kScale);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Quantiles summarize(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("summary of an empty set");
  return {quantile(values, 0.5), quantile(values, 0.1), quantile(values, 0.9),
          *std::min_element(values.begin(), values.end()), *std::max_element(values.begin(), values.end())};
}

ForecastSummary summarize(std::vector<EventPrediction> samples) {
  ForecastSummary s;
  s.samples = std::move(samples);
  for (int t = 0; t < kTypeCount; ++t) {
    std::vector<double> v;
    for (const auto& p : s.samples) v.push_back(p.type_probs(t));
    s.type[static_cast<std::size_t>(t)] = summarize(v);
  }
  for (int j = 0; j < model::kSubtypeCount; ++j) {
    std::vector<double> v;
    for (const auto& p : s.samples) v.push_back(p.combined(j));
    s.subtype[static_cast<std::size_t>(j)] = summarize(v);
  }
  return s;
}

ForecastSummary forecast_event(const data::Segment& history, const data::Segment* truth_future,
                               const diffusion::RolloutConfig& config, double fps, diffusion::NoisePredictor& predictor,
                               const diffusion::Schedule& schedule, const Classifier& classifier, Index event_frames) {
  const diffusion::FutureSampleSet set = diffusion::rollout(history, truth_future, config, fps, predictor, schedule);
  std::vector<EventPrediction> preds;
  for (const auto& f : set.samples) {
    const Index n = std::min(event_frames, f.frames);
    preds.push_back(classifier(f.slice(f.frames - n, n)));
  }
  return summarize(std::move(preds));
}

}  // namespace gentac::event
