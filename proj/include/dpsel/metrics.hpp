//
// Copyright 2026 The dpsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPSEL_METRICS_HPP_
#define DPSEL_METRICS_HPP_

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dpsel/errors.hpp"

namespace dpsel {

// Selection quality on [0, 1] scores: one minus the score gap to the best
// candidate, so picking the argmax scores one.
inline double selection_accuracy(const std::vector<double>& scores, std::size_t selected) {
  if (scores.empty() || selected >= scores.size()) {
    throw DomainError("selected index out of range");
  }
  const double best = *std::max_element(scores.begin(), scores.end());
  return 1.0 - (best - scores[selected]);
}

// F1 over per-position release decisions. Two degenerate conventions: if
// nothing should fire and nothing did, the score is one; if either precision
// or recall is undefined or both are zero, the score is zero.
inline double f1_score(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size()) {
    throw DomainError("mask lengths differ");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    tp += (predicted[i] && truth[i]) ? 1 : 0;
    fp += (predicted[i] && !truth[i]) ? 1 : 0;
    fn += (!predicted[i] && truth[i]) ? 1 : 0;
  }
  if (tp + fp == 0 && tp + fn == 0) {
    return 1.0;
  }
  if (tp == 0) {
    return 0.0;
  }
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace dpsel

#endif  // DPSEL_METRICS_HPP_
