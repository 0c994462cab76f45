/*
 * Copyright 2026 The swin4d Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <vector>

namespace swin4d {

// Mann-Whitney AUC; tied scores count one half. Needs both classes.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Mean of per-class recalls, predicting class 1 when score > threshold.
double balanced_accuracy(const std::vector<double>& scores, const std::vector<int>& labels, double threshold = 0.0);

double mean_squared_error(const std::vector<double>& pred, const std::vector<double>& target);
double mean_absolute_error(const std::vector<double>& pred, const std::vector<double>& target);

struct WindowHomogeneity {
  // Fraction of each subject's windows predicted correctly.
  std::vector<double> accuracy;
  // counts[b] = subjects whose accuracy rounds to b / bins.
  std::vector<std::int64_t> counts;
  // Share of subjects whose windows all received the same prediction.
  double fraction_identical = 0.0;
};

// predictions[s] holds the 0/1 window predictions of subject s.
WindowHomogeneity window_homogeneity(const std::vector<std::vector<int>>& predictions, const std::vector<int>& labels,
                                     int bins = 10);

}  // namespace swin4d
