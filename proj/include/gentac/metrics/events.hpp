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

#include "gentac/event/event.hpp"

#include <string>
#include <vector>

namespace gentac::metrics {

/// Indices of the k largest entries, ties to the lower index.
std::vector<int> top_k(const Eigen::RowVectorXd& probs, int k);

struct ClassRecall {
  int support = 0;
  double recall_at_1 = 0, recall_at_3 = 0, recall_at_5 = 0;
};

struct EventReport {
  int samples = 0;
  /// Combined 15-way distribution.
  double subtype_top1 = 0, subtype_top3 = 0, subtype_top5 = 0;
  double type_top1 = 0, type_top3 = 0;
  /// Per class recall; classes without support keep support 0.
  std::vector<ClassRecall> subtype_recall;  // 15
  std::vector<ClassRecall> type_recall;     // 5
  /// Macro averages over classes with support.
  double subtype_macro_recall_1 = 0, subtype_macro_recall_3 = 0, subtype_macro_recall_5 = 0;
  double type_macro_recall_1 = 0, type_macro_recall_3 = 0;
  /// Type level, macro over classes that occur in labels or predictions.
  double type_macro_precision_1 = 0, type_macro_f1_1 = 0;
  /// confusion[true][predicted] at type level.
  std::vector<std::vector<int>> type_confusion;
};

EventReport event_metrics(const std::vector<event::EventPrediction>& predictions,
                          const std::vector<event::EventLabel>& labels);

std::string event_report_csv(const EventReport& report);

}  // namespace gentac::metrics
