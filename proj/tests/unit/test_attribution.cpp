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

#include "swin4d/attribution.hpp"
#include "swin4d/error.hpp"
#include "swin4d/filters.hpp"
#include "swin4d/ops.hpp"
#include "test_support.hpp"

namespace swin4d {
namespace {

using TD = Tensor<double>;

ScalarFunction<double> linear(const TD& w) {
  return [w](const TD& x) { return sum(mul(w, x)); };
}

ScalarFunction<double> weighted_square(const TD& w) {
  return [w](const TD& x) { return sum(mul(w, square(x))); };
}

TEST(IntegratedGradients, LinearModelIsExact) {
  std::mt19937_64 rng(1);
  const auto w = testing::random_tensor({2, 3, 3, 2, 1}, rng);
  const auto x = testing::random_tensor({2, 3, 3, 2, 1}, rng);
  const auto b = testing::random_tensor({2, 3, 3, 2, 1}, rng);
  for (int steps : {1, 7, 32}) {
    const auto ig = integrated_gradients(linear(w), x, b, steps);
    EXPECT_EQ(ig.steps, steps);
    for (Index j = 0; j < x.numel(); ++j)
      EXPECT_NEAR(ig.values.data()[j], w.data()[j] * (x.data()[j] - b.data()[j]), 1e-12);
  }
}

TEST(IntegratedGradients, ZeroWhenInputIsBaseline) {
  std::mt19937_64 rng(2);
  const auto w = testing::random_tensor({3, 4}, rng);
  const auto x = testing::random_tensor({3, 4}, rng);
  const auto ig = integrated_gradients(weighted_square(w), x, x, 5);
  for (double v : ig.values.data()) EXPECT_EQ(v, 0.0);
}

TEST(IntegratedGradients, MidpointRuleOnQuadratic) {
  // For w * x^2 the gradient is linear along the path, so the midpoint rule
  // is exact: IG_j = w_j (x_j^2 - b_j^2).
  std::mt19937_64 rng(3);
  const auto w = testing::random_tensor({10}, rng);
  const auto x = testing::random_tensor({10}, rng);
  const auto b = testing::random_tensor({10}, rng);
  const auto ig = integrated_gradients(weighted_square(w), x, b, 3);
  for (Index j = 0; j < 10; ++j) {
    const double xj = x.data()[j], bj = b.data()[j];
    EXPECT_NEAR(ig.values.data()[j], w.data()[j] * (xj * xj - bj * bj), 1e-12);
  }
}

TEST(IntegratedGradients, Errors) {
  const TD x({4}, 1.0);
  EXPECT_THROW(integrated_gradients(linear(x), x, x, 0), ValidationError);
  EXPECT_THROW(integrated_gradients(linear(x), x, TD({5}, 0.0), 4), ShapeError);
  EXPECT_THROW(ig_sq(linear(x), x, x, 4, 0.1, 0), ValidationError);
}

double completeness_error(const SwinModel<double>& model, const TD& x, int steps) {
  const auto f = model_output(model);
  const auto b = background_baseline(x);
  const auto ig = integrated_gradients(f, x, b, steps);
  double total = 0;
  for (double v : ig.values.data()) total += v;
  NoGradGuard guard;
  const double delta = f(x).item() - f(b).item();
  return std::abs(total - delta) / std::abs(delta);
}

TEST(IntegratedGradients, CompletenessOnTinyModel) {
  auto cfg = ModelConfig::tiny();
  cfg.input_dims = {4, 16, 16, 16};
  const SwinModel<double> model(cfg, 11);
  std::mt19937_64 rng(11);
  const auto x = testing::random_tensor({4, 16, 16, 16, 1}, rng);
  const double coarse = completeness_error(model, x, 16);
  const double fine = completeness_error(model, x, 256);
  EXPECT_LT(coarse, 0.10);
  EXPECT_LT(fine, 0.01);
  EXPECT_LE(fine, coarse);
}

TEST(IgSq, DegenerateCaseIsSquaredIg) {
  std::mt19937_64 rng(4);
  const auto w = testing::random_tensor({6}, rng);
  const auto x = testing::random_tensor({6}, rng);
  const TD b({6}, -0.5);
  const auto ig = integrated_gradients(weighted_square(w), x, b, 4);
  const auto sq = ig_sq(weighted_square(w), x, b, 4, 0.0, 1);
  for (Index j = 0; j < 6; ++j) EXPECT_EQ(sq.values.data()[j], ig.values.data()[j] * ig.values.data()[j]);
  EXPECT_EQ(sq.samples, 1);
}

TEST(IgSq, NonNegativeAndVarianceShrinks) {
  std::mt19937_64 rng(5);
  const auto w = testing::random_tensor({24}, rng);
  const auto x = testing::random_tensor({24}, rng);
  const TD b({24}, 0.0);
  auto spread = [&](int n) {
    const int seeds = 12;
    std::vector<std::vector<double>> maps;
    for (int s = 0; s < seeds; ++s) {
      const auto m = ig_sq(weighted_square(w), x, b, 2, 0.5, n, 1000 + s);
      for (double v : m.values.data()) EXPECT_GE(v, 0.0);
      maps.emplace_back(m.values.data().begin(), m.values.data().end());
    }
    double var = 0;
    for (std::size_t j = 0; j < 24; ++j) {
      double mean = 0, sq = 0;
      for (const auto& m : maps) mean += m[j] / seeds;
      for (const auto& m : maps) sq += (m[j] - mean) * (m[j] - mean) / (seeds - 1);
      var += sq / 24;
    }
    return var;
  };
  const double v4 = spread(4), v64 = spread(64);
  EXPECT_LT(v64, v4);
  EXPECT_LT(v64, v4 / 4);  // ideal ratio is 16
}

// Direct recomputation: global min-max, full 3-D product-kernel convolution
// with mirrored borders, time mean, subject mean.
std::vector<double> process_oracle(const TD& map, double sigma) {
  const Index t = map.dim(0), h = map.dim(1), w = map.dim(2), d = map.dim(3);
  const auto v = map.data();
  double lo = INFINITY, hi = -INFINITY;
  for (double e : v) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const auto radius = static_cast<Index>(std::ceil(3 * sigma));
  std::vector<double> k;
  double kt = 0;
  for (Index i = -radius; i <= radius; ++i) {
    k.push_back(std::exp(-0.5 * double(i * i) / (sigma * sigma)));
    kt += k.back();
  }
  auto mirror = [](Index i, Index n) {
    while (i < 0 || i >= n) i = i < 0 ? -1 - i : 2 * n - 1 - i;
    return i;
  };
  std::vector<double> out(h * w * d, 0.0);
  for (Index f = 0; f < t; ++f)
    for (Index a = 0; a < h; ++a)
      for (Index bb = 0; bb < w; ++bb)
        for (Index c = 0; c < d; ++c) {
          double acc = 0;
          for (Index i = -radius; i <= radius; ++i)
            for (Index j = -radius; j <= radius; ++j)
              for (Index l = -radius; l <= radius; ++l) {
                const double e = v[((f * h + mirror(a + i, h)) * w + mirror(bb + j, w)) * d + mirror(c + l, d)];
                acc += k[i + radius] * k[j + radius] * k[l + radius] / (kt * kt * kt) * (hi > lo ? (e - lo) / (hi - lo) : 0.0);
              }
          out[(a * w + bb) * d + c] += acc / t;
        }
  return out;
}

TEST(Aggregate, MatchesRecomputation) {
  std::mt19937_64 rng(6);
  std::vector<AttributionMap<double>> maps(3);
  for (auto& m : maps) m.values = testing::random_tensor({3, 5, 6, 4, 1}, rng);
  const auto g = aggregate_maps(maps, {true, false, true}, 1.0);
  EXPECT_EQ(g.dims, (Dims3{5, 6, 4}));
  const auto a = process_oracle(maps[0].values, 1.0), c = process_oracle(maps[2].values, 1.0);
  ASSERT_EQ(g.values.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(g.values[i], 0.5 * (a[i] + c[i]), 1e-10);
}

TEST(Aggregate, ConstantAndIdenticalMaps) {
  std::vector<AttributionMap<double>> one(1);
  one[0].values = TD({2, 3, 3, 3}, 4.0);
  const auto flat = aggregate_maps(one, {true}, 1.0);
  for (double v : flat.values) EXPECT_EQ(v, flat.values[0]);

  std::mt19937_64 rng(7);
  std::vector<AttributionMap<double>> same(2);
  same[0].values = testing::random_tensor({2, 4, 4, 4}, rng);
  same[1].values = same[0].values;
  const auto single = aggregate_maps(std::vector<AttributionMap<double>>{same[0]}, {true}, 0.8);
  const auto pair = aggregate_maps(same, {true, true}, 0.8);
  for (std::size_t i = 0; i < single.values.size(); ++i) EXPECT_NEAR(pair.values[i], single.values[i], 1e-15);
}

TEST(Aggregate, Errors) {
  std::vector<AttributionMap<double>> maps(2);
  maps[0].values = TD({2, 3, 3, 3}, 1.0);
  maps[1].values = TD({2, 3, 3, 4}, 1.0);
  EXPECT_THROW(aggregate_maps(maps, {false, false}, 1.0), ValidationError);
  EXPECT_THROW(aggregate_maps(maps, {true}, 1.0), ValidationError);
  EXPECT_THROW(aggregate_maps(maps, {true, true}, 1.0), ShapeError);
}

TEST(Localization, BlobRatio) {
  const Dims3 dims{12, 12, 12};
  const auto blob = signature_blob(dims);
  GroupMap map{dims, std::vector<double>(12 * 12 * 12, 1.0)};
  EXPECT_DOUBLE_EQ(localization_factor(map, blob), 1.0);
  Index inside = 0;
  for (Index h = 0, i = 0; h < 12; ++h)
    for (Index w = 0; w < 12; ++w)
      for (Index d = 0; d < 12; ++d, ++i)
        if (blob.inside(h, w, d)) {
          map.values[i] = 3.0;
          ++inside;
        }
  ASSERT_GT(inside, 0);
  EXPECT_DOUBLE_EQ(localization_factor(map, blob), 3.0);
}

}  // namespace
}  // namespace swin4d
