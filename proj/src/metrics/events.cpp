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

#include "gentac/metrics/events.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace gentac::metrics {

namespace {

bool in_top(const Eigen::RowVectorXd& probs, int label, int k) {
  const auto top = top_k(probs, k);
  return std::find(top.begin(), top.end(), label) != top.end();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<int> top_k(const Eigen::RowVectorXd& probs, int k) {
  std::vector<int> idx(static_cast<std::size_t>(probs.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return probs(a) > probs(b); });
  idx.resize(static_cast<std::size_t>(std::min<Eigen::Index>(k, probs.size())));
  return idx;
}

EventReport event_metrics(const std::vector<event::EventPrediction>& predictions,
                          const std::vector<event::EventLabel>& labels) {
  if (predictions.empty()) throw std::invalid_argument("event_metrics needs at least one prediction");
  if (predictions.size() != labels.size()) throw std::invalid_argument("predictions and labels differ in length");
  EventReport r;
  r.samples = static_cast<int>(predictions.size());
  r.subtype_recall.resize(model::kSubtypeCount);
  r.type_recall.resize(model::kTypeCount);
  r.type_confusion.assign(model::kTypeCount, std::vector<int>(model::kTypeCount, 0));

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    const auto& l = labels[i];
    const Eigen::RowVectorXd combined = p.combined;
    const Eigen::RowVectorXd types = p.type_probs;
    const bool s1 = in_top(combined, l.subtype, 1), s3 = in_top(combined, l.subtype, 3),
               s5 = in_top(combined, l.subtype, 5);
    const bool t1 = in_top(types, l.type, 1), t3 = in_top(types, l.type, 3);
    r.subtype_top1 += s1;
    r.subtype_top3 += s3;
    r.subtype_top5 += s5;
    r.type_top1 += t1;
    r.type_top3 += t3;
    auto& sc = r.subtype_recall[static_cast<std::size_t>(l.subtype)];
    ++sc.support;
    sc.recall_at_1 += s1;
    sc.recall_at_3 += s3;
    sc.recall_at_5 += s5;
    auto& tc = r.type_recall[static_cast<std::size_t>(l.type)];
    ++tc.support;
    tc.recall_at_1 += t1;
    tc.recall_at_3 += t3;
    tc.recall_at_5 += in_top(types, l.type, 5);
    ++r.type_confusion[static_cast<std::size_t>(l.type)][static_cast<std::size_t>(top_k(types, 1).front())];
  }
  const double n = r.samples;
  r.subtype_top1 /= n;
  r.subtype_top3 /= n;
  r.subtype_top5 /= n;
  r.type_top1 /= n;
  r.type_top3 /= n;

  auto finish = [](std::vector<ClassRecall>& classes, double& m1, double& m3, double* m5) {
    int present = 0;
    for (auto& c : classes) {
      if (c.support == 0) continue;
      c.recall_at_1 /= c.support;
      c.recall_at_3 /= c.support;
      c.recall_at_5 /= c.support;
      m1 += c.recall_at_1;
      m3 += c.recall_at_3;
      if (m5) *m5 += c.recall_at_5;
      ++present;
    }
    m1 /= present;
    m3 /= present;
    if (m5) *m5 /= present;
  };
  finish(r.subtype_recall, r.subtype_macro_recall_1, r.subtype_macro_recall_3, &r.subtype_macro_recall_5);
  finish(r.type_recall, r.type_macro_recall_1, r.type_macro_recall_3, nullptr);

  int classes = 0;
  for (int c = 0; c < model::kTypeCount; ++c) {
    int tp = r.type_confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)], predicted = 0, actual = 0;
    for (int o = 0; o < model::kTypeCount; ++o) {
      predicted += r.type_confusion[static_cast<std::size_t>(o)][static_cast<std::size_t>(c)];
      actual += r.type_confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(o)];
    }
    if (predicted == 0 && actual == 0) continue;
    const double precision = predicted ? static_cast<double>(tp) / predicted : 0.0;
    const double recall = actual ? static_cast<double>(tp) / actual : 0.0;
    r.type_macro_precision_1 += precision;
    r.type_macro_f1_1 += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    ++classes;
  }
  r.type_macro_precision_1 /= classes;
  r.type_macro_f1_1 /= classes;
  return r;
}

std::string event_report_csv(const EventReport& r) {
  std::string out = "level,class,support,recall_at_1,recall_at_3,recall_at_5\n";
  for (int t = 0; t < model::kTypeCount; ++t) {
    const auto& c = r.type_recall[static_cast<std::size_t>(t)];
    out += std::string("type,") + std::string(model::kTypeNames[static_cast<std::size_t>(t)]) + "," +
           std::to_string(c.support) + "," + fmt(c.recall_at_1) + "," + fmt(c.recall_at_3) + "," +
           fmt(c.recall_at_5) + "\n";
  }
  for (int s = 0; s < model::kSubtypeCount; ++s) {
    const auto& c = r.subtype_recall[static_cast<std::size_t>(s)];
    out += std::string("subtype,") + std::string(model::kSubtypeNames[static_cast<std::size_t>(s)]) + "," +
           std::to_string(c.support) + "," + fmt(c.recall_at_1) + "," + fmt(c.recall_at_3) + "," +
           fmt(c.recall_at_5) + "\n";
  }
  out += "type,macro,," + fmt(r.type_macro_recall_1) + "," + fmt(r.type_macro_recall_3) + ",\n";
  out += "subtype,macro,," + fmt(r.subtype_macro_recall_1) + "," + fmt(r.subtype_macro_recall_3) + "," +
         fmt(r.subtype_macro_recall_5) + "\n";
  out += "type,accuracy," + std::to_string(r.samples) + "," + fmt(r.type_top1) + "," + fmt(r.type_top3) + ",\n";
  out += "subtype,accuracy," + std::to_string(r.samples) + "," + fmt(r.subtype_top1) + "," + fmt(r.subtype_top3) +
         "," + fmt(r.subtype_top5) + "\n";
  out += "type,precision_at_1,," + fmt(r.type_macro_precision_1) + ",,\n";
  out += "type,f1_at_1,," + fmt(r.type_macro_f1_1) + ",,\n";
  return out;
}

}  // namespace gentac::metrics
