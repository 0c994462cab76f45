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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "swin4d/error.hpp"
#include "swin4d/metrics.hpp"

namespace swin4d {
namespace {

struct Fixture {
  std::vector<double> scores, targets;
  std::vector<int> labels;
};

// 50 subjects; scores are rounded to one decimal so ties occur.
Fixture fixture() {
  Fixture f;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    const int y = (i * 7 + 3) % 5 < 2;
    f.labels.push_back(y);
    f.scores.push_back(std::round((n(rng) + 0.8 * y) * 10) / 10);
    f.targets.push_back(n(rng));
  }
  return f;
}

double pair_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return wins / pairs;
}

TEST(Metrics, FiftySampleReference) {
  const auto f = fixture();
  EXPECT_NEAR(roc_auc(f.scores, f.labels), pair_auc(f.scores, f.labels), 1e-9);

  double tp = 0, tn = 0, pos = 0, negc = 0;
  for (int i = 0; i < 50; ++i) {
    const bool hit = f.scores[i] > 0;
    if (f.labels[i]) {
      pos += 1;
      tp += hit;
    } else {
      negc += 1;
      tn += !hit;
    }
  }
  EXPECT_NEAR(balanced_accuracy(f.scores, f.labels), 0.5 * (tp / pos + tn / negc), 1e-9);

  double se = 0, ae = 0;
  for (int i = 0; i < 50; ++i) {
    se += (f.scores[i] - f.targets[i]) * (f.scores[i] - f.targets[i]);
    ae += std::abs(f.scores[i] - f.targets[i]);
  }
  EXPECT_NEAR(mean_squared_error(f.scores, f.targets), se / 50, 1e-9);
  EXPECT_NEAR(mean_absolute_error(f.scores, f.targets), ae / 50, 1e-9);
}

TEST(Metrics, AucEdgeCases) {
  EXPECT_EQ(roc_auc({0.1, 0.9}, {0, 1}), 1.0);
  EXPECT_EQ(roc_auc({0.9, 0.1}, {0, 1}), 0.0);
  EXPECT_EQ(roc_auc({0.5, 0.5, 0.5}, {0, 1, 1}), 0.5);
  EXPECT_THROW(roc_auc({0.1, 0.2}, {1, 1}), ValidationError);
  EXPECT_THROW(roc_auc({0.1}, {0, 1}), ValidationError);
}

TEST(Metrics, BalancedAccuracyUsesStrictThreshold) {
  EXPECT_EQ(balanced_accuracy({0.0, 0.0}, {0, 1}), 0.5);
  EXPECT_EQ(balanced_accuracy({-1, 1, 1, 1}, {0, 1, 1, 1}), 1.0);
  EXPECT_EQ(balanced_accuracy({1, 1, 1, -1}, {0, 1, 1, 1}), 0.5 * (0.0 + 2.0 / 3.0));
}

TEST(WindowHomogeneityTest, AllCorrect) {
  const auto r = window_homogeneity({{1, 1, 1}, {0, 0}}, {1, 0});
  ASSERT_EQ(r.counts.size(), 11u);
  EXPECT_EQ(r.counts[10], 2);
  for (int b = 0; b < 10; ++b) EXPECT_EQ(r.counts[b], 0);
  EXPECT_EQ(r.fraction_identical, 1.0);
}

TEST(WindowHomogeneityTest, SevenOfTenLandsInBinSeven) {
  const auto r = window_homogeneity({{1, 1, 1, 1, 1, 1, 1, 0, 0, 0}}, {1});
  EXPECT_DOUBLE_EQ(r.accuracy[0], 0.7);
  EXPECT_EQ(r.counts[7], 1);
  EXPECT_EQ(r.fraction_identical, 0.0);
}

TEST(WindowHomogeneityTest, FractionIdenticalMatchesRecount) {
  std::mt19937_64 rng(6);
  std::vector<std::vector<int>> preds;
  std::vector<int> labels;
  for (int s = 0; s < 40; ++s) {
    std::vector<int> p(1 + s % 6);
    const bool uniform = s % 3 == 0;
    for (auto& v : p) v = uniform ? s % 2 : static_cast<int>(rng() % 2);
    preds.push_back(p);
    labels.push_back(static_cast<int>(rng() % 2));
  }
  double identical = 0;
  std::vector<std::int64_t> counts(11, 0);
  for (std::size_t s = 0; s < preds.size(); ++s) {
    bool same = true;
    int correct = 0;
    for (int v : preds[s]) {
      same = same && v == preds[s][0];
      correct += v == labels[s];
    }
    identical += same;
    counts[std::lround(10.0 * correct / preds[s].size())] += 1;
  }
  const auto r = window_homogeneity(preds, labels);
  EXPECT_EQ(r.fraction_identical, identical / 40);
  EXPECT_EQ(r.counts, counts);
}

}  // namespace
}  // namespace swin4d
