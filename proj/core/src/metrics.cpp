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

#include "swin4d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "swin4d/error.hpp"

namespace swin4d {

namespace {

void check_sizes(std::size_t a, std::size_t b, const char* where) {
  if (a != b) throw ValidationError(std::string(where) + ": size mismatch");
  if (a == 0) throw ValidationError(std::string(where) + ": empty input");
}

void check_label(int y, const char* where) {
  if (y != 0 && y != 1) throw ValidationError(std::string(where) + ": labels must be 0 or 1");
}

}  // namespace

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_sizes(scores.size(), labels.size(), "roc_auc");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::int64_t pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      check_label(labels[order[k]], "roc_auc");
      if (labels[order[k]] == 1) {
        rank_sum += avg_rank;
        ++pos;
      }
    }
    i = j;
  }
  const auto neg = static_cast<std::int64_t>(n) - pos;
  if (pos == 0 || neg == 0) throw ValidationError("roc_auc: both classes must be present");
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1) / 2) / (p * static_cast<double>(neg));
}

double balanced_accuracy(const std::vector<double>& scores, const std::vector<int>& labels, double threshold) {
  check_sizes(scores.size(), labels.size(), "balanced_accuracy");
  double hit[2] = {0, 0}, total[2] = {0, 0};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    check_label(labels[i], "balanced_accuracy");
    const int pred = scores[i] > threshold ? 1 : 0;
    total[labels[i]] += 1;
    if (pred == labels[i]) hit[labels[i]] += 1;
  }
  if (total[0] == 0 || total[1] == 0) throw ValidationError("balanced_accuracy: both classes must be present");
  return 0.5 * (hit[0] / total[0] + hit[1] / total[1]);
}

double mean_squared_error(const std::vector<double>& pred, const std::vector<double>& target) {
  check_sizes(pred.size(), target.size(), "mean_squared_error");
  double s = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double mean_absolute_error(const std::vector<double>& pred, const std::vector<double>& target) {
  check_sizes(pred.size(), target.size(), "mean_absolute_error");
  double s = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

WindowHomogeneity window_homogeneity(const std::vector<std::vector<int>>& predictions, const std::vector<int>& labels,
                                     int bins) {
  check_sizes(predictions.size(), labels.size(), "window_homogeneity");
  if (bins < 1) throw ValidationError("window_homogeneity: bins must be positive");
  WindowHomogeneity out;
  out.counts.assign(static_cast<std::size_t>(bins) + 1, 0);
  std::int64_t identical = 0;
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    const auto& p = predictions[s];
    if (p.empty()) throw ValidationError("window_homogeneity: subject without windows");
    const auto correct = std::count(p.begin(), p.end(), labels[s]);
    const double acc = static_cast<double>(correct) / static_cast<double>(p.size());
    out.accuracy.push_back(acc);
    out.counts[static_cast<std::size_t>(std::lround(acc * bins))] += 1;
    if (std::all_of(p.begin(), p.end(), [&](int v) { return v == p.front(); })) ++identical;
  }
  out.fraction_identical = static_cast<double>(identical) / static_cast<double>(predictions.size());
  return out;
}

}  // namespace swin4d
