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

#include "swin4d/autodiff.hpp"
#include "swin4d/error.hpp"
#include "swin4d/objectives.hpp"
#include "swin4d/ops.hpp"
#include "contrastive_oracle.hpp"
#include "test_support.hpp"

namespace swin4d {
namespace {

using testing::random_tensor;
using TD = Tensor<double>;
using testing::instance_oracle;
using testing::instance_with_positive;
using testing::local_oracle;
using testing::random_batch;
using testing::unit;

TEST(Bce, KnownValuesAndSaturation) {
  EXPECT_NEAR(bce_loss(TD({1}, 0.0), {1.0}).item(), std::log(2.0), 1e-15);
  const double sat = bce_loss(TD({1}, 30.0), {1.0}).item();
  EXPECT_GE(sat, 0.0);
  EXPECT_LT(sat, 1e-12);
  EXPECT_TRUE(std::isfinite(bce_loss(TD({1}, -800.0), {1.0}).item()));
  EXPECT_THROW(bce_loss(TD({1}, 0.0), {0.5}), ValidationError);
}

TEST(Bce, MatchesNaiveFormula) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> logits(16), labels(16);
  double want = 0;
  for (int i = 0; i < 16; ++i) {
    logits[i] = u(rng);
    labels[i] = i % 3 == 0;
    const double s = 1 / (1 + std::exp(-logits[i]));
    want += -labels[i] * std::log(s) - (1 - labels[i]) * std::log(1 - s);
  }
  EXPECT_NEAR(bce_loss(TD({16}, logits), labels).item(), want / 16, 1e-10);
}

TEST(Mse, Arithmetic) {
  EXPECT_EQ(mse_loss(TD({1}, 2.0), TD({1}, 2.0)).item(), 0.0);
  EXPECT_EQ(mse_loss(TD({1}, 1.0), TD({1}, 0.0)).item(), 1.0);
  EXPECT_DOUBLE_EQ(mse_loss(TD({2}, std::vector<double>{1, 3}), TD({2}, std::vector<double>{0, 1})).item(), 2.5);
}

TEST(CosExp, Extremes) {
  const TD u({3}, std::vector<double>{1, 2, -1});
  EXPECT_NEAR(cos_exp(u, u).item(), std::exp(1.0), 1e-12);
  EXPECT_NEAR(cos_exp(unit(3, 0), unit(3, 2)).item(), 1.0, 1e-15);
  EXPECT_NEAR(cos_exp(u, neg(u)).item(), std::exp(-1.0), 1e-12);
  EXPECT_THROW(cos_exp(u, TD({3})), ValidationError);
}

TEST(InstanceLoss, OrthogonalBatchGivesLn2AndPositiveInDenominatorGivesLn3) {
  ContrastiveBatch<double> b{ContrastiveMode::kInstance, {unit(4, 0), unit(4, 1)}, {unit(4, 2), unit(4, 3)}};
  EXPECT_NEAR(instance_contrastive_loss(b).item(), std::log(2.0), 1e-9);
  EXPECT_NEAR(instance_contrastive_loss(b).item(), 0.693147, 1e-6);
  // Negative control: the positive pair in the denominator would give ln 3.
  EXPECT_NEAR(instance_with_positive(b), std::log(3.0), 1e-12);
  EXPECT_GT(std::abs(instance_contrastive_loss(b).item() - std::log(3.0)), 0.4);
}

TEST(InstanceLoss, IdenticalViewsGiveLn2MinusOne) {
  ContrastiveBatch<double> b{ContrastiveMode::kInstance, {unit(2, 0), unit(2, 1)}, {unit(2, 0), unit(2, 1)}};
  EXPECT_NEAR(instance_contrastive_loss(b).item(), std::log(2.0) - 1, 1e-9);
}

TEST(InstanceLoss, RandomBatchesMatchDoubleLoop) {
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto b = random_batch(ContrastiveMode::kInstance, 3 + seed % 3, 5, rng);
    EXPECT_NEAR(instance_contrastive_loss(b).item(), instance_oracle(b), 1e-10);
    ContrastiveOptions warm{0.5, false};
    EXPECT_NEAR(instance_contrastive_loss(b, warm).item(), instance_oracle(b, 0.5), 1e-10);
  }
}

TEST(InstanceLoss, SymmetricVariantAveragesBothAnchors) {
  std::mt19937_64 rng(3);
  const auto b = random_batch(ContrastiveMode::kInstance, 4, 3, rng);
  ContrastiveBatch<double> swapped{ContrastiveMode::kInstance, b.second, b.first};
  const double want = 0.5 * (instance_oracle(b) + instance_oracle(swapped));
  EXPECT_NEAR(instance_contrastive_loss(b, {1.0, true}).item(), want, 1e-10);
}

TEST(LocalLoss, ForcedCases) {
  ContrastiveBatch<double> same{ContrastiveMode::kLocalLocal, {unit(2, 0), unit(2, 1)}, {unit(2, 0), unit(2, 1)}};
  EXPECT_NEAR(local_local_loss(same).item(), 2 * (std::log(2.0) - 1), 1e-9);
  EXPECT_NEAR(local_local_loss(same).item(), -0.613706, 1e-6);
  ContrastiveBatch<double> ortho{ContrastiveMode::kLocalLocal, {unit(4, 0), unit(4, 1)}, {unit(4, 2), unit(4, 3)}};
  EXPECT_NEAR(local_local_loss(ortho).item(), 2 * std::log(2.0), 1e-9);
}

TEST(LocalLoss, RandomBatchesMatchDoubleLoopAndSubjectMean) {
  std::vector<ContrastiveBatch<double>> subjects;
  double mean = 0;
  for (int seed = 0; seed < 6; ++seed) {
    std::mt19937_64 rng(100 + seed);
    subjects.push_back(random_batch(ContrastiveMode::kLocalLocal, 3, 4, rng));
    EXPECT_NEAR(local_local_loss(subjects.back()).item(), local_oracle(subjects.back()), 1e-10);
    mean += local_oracle(subjects.back()) / 6;
  }
  EXPECT_NEAR(local_local_loss(subjects).item(), mean, 1e-10);
}

TEST(Contrastive, BatchSizeAndModeAreChecked) {
  ContrastiveBatch<double> one{ContrastiveMode::kInstance, {unit(2, 0)}, {unit(2, 1)}};
  EXPECT_THROW(instance_contrastive_loss(one), ValidationError);
  one.mode = ContrastiveMode::kLocalLocal;
  EXPECT_THROW(local_local_loss(one), ValidationError);
  ContrastiveBatch<double> wrong{ContrastiveMode::kLocalLocal, {unit(2, 0), unit(2, 1)}, {unit(2, 1), unit(2, 0)}};
  EXPECT_THROW(instance_contrastive_loss(wrong), ValidationError);
}

TEST(Contrastive, ScaleInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> s(0.01, 100);
  for (auto mode : {ContrastiveMode::kInstance, ContrastiveMode::kLocalLocal}) {
    auto b = random_batch(mode, 4, 6, rng);
    const double base = mode == ContrastiveMode::kInstance ? instance_contrastive_loss(b).item()
                                                           : local_local_loss(b).item();
    for (auto& t : b.first) t = scale(t, s(rng));
    for (auto& t : b.second) t = scale(t, s(rng));
    const double scaled = mode == ContrastiveMode::kInstance ? instance_contrastive_loss(b).item()
                                                             : local_local_loss(b).item();
    EXPECT_NEAR(scaled, base, 1e-10);
  }
}

// Rotating the positive toward the anchor with negatives fixed.
TEST(Contrastive, LossFallsAsPositiveAligns) {
  for (auto mode : {ContrastiveMode::kInstance, ContrastiveMode::kLocalLocal}) {
    double prev = INFINITY;
    for (int k = 0; k <= 20; ++k) {
      const double a = M_PI * (1.0 - k / 20.0);
      ContrastiveBatch<double> b{mode,
                                 {TD({3}, std::vector<double>{1, 0, 0}), TD({3}, std::vector<double>{0, 0, 1})},
                                 {TD({3}, std::vector<double>{std::cos(a), std::sin(a), 0}),
                                  TD({3}, std::vector<double>{0, 1, 1})}};
      const double loss = mode == ContrastiveMode::kInstance ? instance_contrastive_loss(b).item()
                                                             : local_local_loss(b).item();
      EXPECT_LT(loss, prev) << k;
      prev = loss;
    }
  }
}

TEST(Contrastive, GradientsMatchFiniteDifferences) {
  for (int seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    for (auto mode : {ContrastiveMode::kInstance, ContrastiveMode::kLocalLocal}) {
      auto b = random_batch(mode, 3, 4, rng);
      std::vector<TD> leaves;
      for (auto& t : b.first) leaves.push_back(t);
      for (auto& t : b.second) leaves.push_back(t);
      auto loss = [&] {
        return mode == ContrastiveMode::kInstance ? instance_contrastive_loss(b, {0.7, seed % 2 == 1})
                                                  : local_local_loss(b, {0.7, false});
      };
      EXPECT_LT(grad_check_leaves(loss, leaves).max_relative_error, 1e-4);
    }
    std::vector<TD> uv{random_tensor({5}, rng), random_tensor({5}, rng)};
    EXPECT_LT(grad_check_leaves([&] { return cos_exp(uv[0], uv[1]); }, uv).max_relative_error, 1e-4);
  }
}

TEST(Combined, SumAndLinearity) {
  EXPECT_NEAR(combined_pretrain_loss(TD::scalar(0.7), TD::scalar(-0.6)).item(), 0.1, 1e-15);
  EXPECT_EQ(combined_pretrain_loss(TD::scalar(0), TD::scalar(0)).item(), 0.0);
  std::mt19937_64 rng(9);
  auto x = testing::random_leaf({4}, rng);
  auto f = [](const TD& v) { return sum(exp(v)); };
  auto g = [](const TD& v) { return sum(square(v)); };
  backward(combined_pretrain_loss(f(x), g(x)));
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(x.grad()[i], std::exp(x.data()[i]) + 2 * x.data()[i], 1e-12);
}

}  // namespace
}  // namespace swin4d
