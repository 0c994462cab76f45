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

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "swin4d/autodiff.hpp"
#include "swin4d/error.hpp"
#include "swin4d/layers.hpp"
#include "swin4d/ops.hpp"
#include "swin4d/window.hpp"
#include "test_support.hpp"
#include "window_oracle.hpp"

namespace swin4d {
namespace {

using testing::max_abs_diff;
using testing::random_leaf;
using testing::random_tensor;
using TD = Tensor<double>;

using testing::cyclic_attention;
using testing::group_of;
using testing::naive_attention;
using testing::random_attention;

BlockParams<double> random_block(Index c, int heads, int mlp_ratio, const Dims4* window, std::mt19937_64& rng) {
  BlockParams<double> b;
  b.norm1_gamma = random_tensor({c}, rng, 0.3);
  b.norm1_beta = random_tensor({c}, rng, 0.3);
  for (auto& v : b.norm1_gamma.mutable_data()) v += 1;
  b.attn = random_attention(c, heads, window, rng);
  b.norm2_gamma = random_tensor({c}, rng, 0.3);
  for (auto& v : b.norm2_gamma.mutable_data()) v += 1;
  b.norm2_beta = random_tensor({c}, rng, 0.3);
  b.fc1 = {random_tensor({c, mlp_ratio * c}, rng, 0.3), random_tensor({mlp_ratio * c}, rng, 0.3)};
  b.fc2 = {random_tensor({mlp_ratio * c, c}, rng, 0.3), random_tensor({c}, rng, 0.3)};
  return b;
}


TEST(WindowGrid, CeilingCounts) {
  EXPECT_EQ(WindowGrid::make({4, 8, 8, 8}, {2, 4, 4, 4}, false).num_windows(), 16);
  EXPECT_EQ(WindowGrid::make({20, 16, 16, 16}, {4, 4, 4, 4}, false).num_windows(), 320);
  const auto g = WindowGrid::make({5, 3, 7, 2}, {2, 2, 4, 2}, true);
  EXPECT_EQ(g.counts, (Dims4{3, 2, 2, 1}));
  EXPECT_EQ(g.pad, (Dims4{1, 1, 1, 0}));
  EXPECT_EQ(g.shift, (Dims4{1, 1, 2, 1}));
}

TEST(WindowPartition, ReverseIsExactInverse) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Index> dim(1, 6), win(1, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims4 tokens{dim(rng), dim(rng), dim(rng), dim(rng)};
    const Dims4 window{win(rng), win(rng), win(rng), win(rng)};
    const auto x = random_tensor({tokens[0], tokens[1], tokens[2], tokens[3], 3}, rng);
    for (bool shifted : {false, true}) {
      const auto g = WindowGrid::make(tokens, window, shifted);
      const auto w = window_partition(x, g);
      ASSERT_EQ(w.shape(), (Shape{g.num_windows(), g.window_volume(), 3}));
      EXPECT_TRUE(testing::bitwise_equal(window_reverse(w, g), x));
    }
  }
}

TEST(WindowPartition, WindowsHoldRowMajorBlocks) {
  std::mt19937_64 rng(1);
  const auto x = random_tensor({2, 4, 2, 2, 1}, rng);
  const auto g = WindowGrid::make({2, 4, 2, 2}, {1, 2, 2, 2}, false);
  const auto w = window_partition(x, g);
  // Window 3 is (t=1, h-block 1); its slot 5 is (0, 1, 0, 1) inside the window.
  EXPECT_EQ(w.at({3, 5, 0}), x.at({1, 3, 0, 1, 0}));
}

TEST(WindowPartition, GradientIsInverseRelayout) {
  std::mt19937_64 rng(2);
  const auto g = WindowGrid::make({3, 3, 2, 5}, {2, 2, 2, 2}, true);
  const auto x = random_tensor({3, 3, 2, 5, 2}, rng);
  auto f = [&](const TD& v) { return sum(square(window_partition(v, g))); };
  EXPECT_LT(grad_check(f, x), 1e-8);
}

TEST(ShiftMask, TrivialWithoutShiftOrPadding) {
  const auto m = build_shift_mask<double>(WindowGrid::make({4, 4, 4, 4}, {2, 2, 2, 2}, false));
  for (double v : m.values.data()) EXPECT_EQ(v, 0.0);
}

// Slot l of window k along a shifted axis holds the padded position (k*w + l + s) mod n.
TEST(ShiftMask, OneDimensionalWrapMatchesBruteForce) {
  const auto g = WindowGrid::make({1, 1, 1, 8}, {1, 1, 1, 4}, true);
  const auto m = build_shift_mask<double>(g);
  ASSERT_EQ(m.values.shape(), (Shape{2, 4, 4}));
  for (Index k = 0; k < 2; ++k)
    for (Index a = 0; a < 4; ++a)
      for (Index b = 0; b < 4; ++b) {
        const Index pa = (k * 4 + a + 2) % 8, pb = (k * 4 + b + 2) % 8;
        const bool same_group = group_of(pa, 4, 2) == group_of(pb, 4, 2);
        EXPECT_EQ(m.values.at({k, a, b}) == 0.0, same_group) << k << " " << a << " " << b;
      }
  // The wrapped window mixes origin tokens {6, 7} and {0, 1}.
  EXPECT_EQ(m.values.at({1, 0, 2}), mask_fill_value<double>());
  EXPECT_EQ(m.values.at({1, 2, 3}), 0.0);
}

TEST(ShiftMask, RandomGridsMatchGroupOracle) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<Index> dim(1, 7), win(1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const Dims4 tokens{dim(rng), dim(rng), dim(rng), dim(rng)};
    const Dims4 window{win(rng), win(rng), win(rng), win(rng)};
    const auto g = WindowGrid::make(tokens, window, true);
    const auto m = build_shift_mask<double>(g);
    const Dims4 p = g.padded_dims();
    const Index len = g.window_volume();
    for (Index k = 0; k < g.num_windows(); ++k) {
      std::vector<std::array<Index, 4>> pos(len);
      std::vector<bool> real(len);
      Index r = k;
      std::array<Index, 4> wi{};
      for (int a = 3; a >= 0; --a) {
        wi[a] = r % g.counts[a];
        r /= g.counts[a];
      }
      for (Index l = 0; l < len; ++l) {
        Index q = l;
        bool ok = true;
        for (int a = 3; a >= 0; --a) {
          pos[l][a] = (wi[a] * window[a] + q % window[a] + g.shift[a]) % p[a];
          q /= window[a];
          ok = ok && pos[l][a] < tokens[a];
        }
        real[l] = ok;
      }
      for (Index i = 0; i < len; ++i)
        for (Index j = 0; j < len; ++j) {
          if (!real[i]) continue;
          bool same = real[j];
          for (int a = 0; a < 4; ++a)
            same = same && group_of(pos[i][a], window[a], g.shift[a]) == group_of(pos[j][a], window[a], g.shift[a]);
          ASSERT_EQ(m.values.at({k, i, j}) == 0.0, same) << "trial " << trial;
        }
    }
  }
}

TEST(ShiftedWindowAttention, CyclicRollMatchesNaiveGroupOracle) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<Index> dim(1, 6), win(2, 4), heads(1, 3), hd(1, 3);
  for (int trial = 0; trial < 12; ++trial) {
    Dims4 tokens{dim(rng), dim(rng), dim(rng), dim(rng)};
    const Dims4 window{win(rng), win(rng), win(rng), win(rng)};
    if (trial == 0) tokens = {5, 7, 3, 6};  // nothing divides
    const int h = static_cast<int>(heads(rng));
    const Index c = h * hd(rng);
    const auto x = random_tensor({tokens[0], tokens[1], tokens[2], tokens[3], c}, rng);
    for (bool bias : {false, true}) {
      const auto a = random_attention(c, h, bias ? &window : nullptr, rng);
      for (bool shifted : {false, true}) {
        const auto g = WindowGrid::make(tokens, window, shifted);
        const double err = max_abs_diff(cyclic_attention(x, a, g, bias), naive_attention(x, a, window, g.shift, bias));
        EXPECT_LT(err, 1e-10) << "trial " << trial << " shifted " << shifted << " bias " << bias;
      }
    }
  }
}

TEST(ShiftedWindowAttention, DemoGridMatchesNaiveOracle) {
  std::mt19937_64 rng(7);
  const Dims4 tokens{4, 8, 8, 8}, window{2, 4, 4, 4};
  const auto x = random_tensor({4, 8, 8, 8, 4}, rng);
  const auto a = random_attention(4, 2, nullptr, rng);
  const auto g = WindowGrid::make(tokens, window, true);
  ASSERT_EQ(g.shift, (Dims4{1, 2, 2, 2}));
  EXPECT_LT(max_abs_diff(cyclic_attention(x, a, g, false), naive_attention(x, a, window, g.shift, false)), 1e-10);
}

TEST(ShiftedWindowAttention, PaddingIsNeutral) {
  std::mt19937_64 rng(9);
  const Dims4 tokens{3, 5, 2, 3}, window{2, 2, 2, 2};
  const auto x = random_tensor({3, 5, 2, 3, 4}, rng);
  const auto a = random_attention(4, 2, nullptr, rng);
  const auto g = WindowGrid::make(tokens, window, false);
  ASSERT_TRUE(g.padded());
  EXPECT_LT(max_abs_diff(cyclic_attention(x, a, g, false), naive_attention(x, a, window, g.shift, false)), 1e-10);
}

TEST(ShiftedWindowAttention, WindowCoveringTheGridIsGlobal) {
  std::mt19937_64 rng(10);
  const Dims4 tokens{2, 3, 2, 3};
  const Index c = 6;
  auto block = random_block(c, 2, 2, nullptr, rng);
  const auto z = random_tensor({2, 3, 2, 3, c}, rng);
  const BlockOptions opt;
  const auto global = global_attention_block(z, block, nullptr, opt);
  for (const Dims4 window : {tokens, Dims4{2, 4, 4, 4}}) {
    const auto g = WindowGrid::make(tokens, window, false);
    const auto local = swin_block(z, block, g, build_shift_mask<double>(g), nullptr, opt);
    EXPECT_LT(max_abs_diff(local, global), 1e-10);
  }
}

TEST(ShiftedWindowAttention, ZeroRelativeTableEqualsAbsoluteMode) {
  std::mt19937_64 rng(12);
  const Dims4 tokens{3, 4, 4, 2}, window{2, 2, 2, 2};
  const auto x = random_tensor({3, 4, 4, 2, 4}, rng);
  auto a = random_attention(4, 2, &window, rng);
  for (auto& v : a.relative_table.mutable_data()) v = 0;
  auto plain = a;
  plain.relative_table = TD();
  for (bool shifted : {false, true}) {
    const auto g = WindowGrid::make(tokens, window, shifted);
    EXPECT_LT(max_abs_diff(cyclic_attention(x, a, g, true), cyclic_attention(x, plain, g, false)), 1e-12);
  }
}

TEST(Wmsa, SingleTokenWindowIsValueProjection) {
  std::mt19937_64 rng(13);
  const Index c = 4;
  const auto a = random_attention(c, 2, nullptr, rng);
  const auto x = random_tensor({5, 1, c}, rng);
  const auto y = wmsa_4d(x, a, static_cast<const AttentionMask<double>*>(nullptr), nullptr);
  for (Index w = 0; w < 5; ++w)
    for (Index j = 0; j < c; ++j) {
      double out = a.proj.bias.data()[j];
      for (Index k = 0; k < c; ++k) {
        double v = a.qkv.bias.data()[2 * c + k];
        for (Index m = 0; m < c; ++m) v += x.at({w, 0, m}) * a.qkv.weight.at({m, 2 * c + k});
        out += v * a.proj.weight.at({k, j});
      }
      EXPECT_NEAR(y.at({w, 0, j}), out, 1e-12);
    }
}

TEST(Wmsa, IdentityValuesGiveConvexCombinations) {
  std::mt19937_64 rng(14);
  const Index c = 4;
  auto a = random_attention(c, 2, nullptr, rng);
  for (Index k = 0; k < c; ++k)
    for (Index j = 0; j < c; ++j) {
      a.qkv.weight.mutable_data()[k * 3 * c + 2 * c + j] = k == j;
      a.proj.weight.mutable_data()[k * c + j] = k == j;
    }
  for (Index j = 0; j < c; ++j) {
    a.qkv.bias.mutable_data()[2 * c + j] = 0;
    a.proj.bias.mutable_data()[j] = 0;
  }
  const auto x = random_tensor({3, 6, c}, rng);
  const auto y = wmsa_4d(x, a, static_cast<const AttentionMask<double>*>(nullptr), nullptr);
  for (Index w = 0; w < 3; ++w)
    for (Index j = 0; j < c; ++j) {
      double lo = INFINITY, hi = -INFINITY;
      for (Index l = 0; l < 6; ++l) {
        lo = std::min(lo, x.at({w, l, j}));
        hi = std::max(hi, x.at({w, l, j}));
      }
      for (Index l = 0; l < 6; ++l) {
        EXPECT_GE(y.at({w, l, j}), lo - 1e-12);
        EXPECT_LE(y.at({w, l, j}), hi + 1e-12);
      }
    }
}

TEST(Wmsa, TwoWindowsMatchLoopOracle) {
  std::mt19937_64 rng(15);
  const auto a = random_attention(4, 2, nullptr, rng);
  // Two windows of 8 tokens laid out as a 2x2x2x2 grid with 1x2x2x2 windows.
  const auto x = random_tensor({2, 2, 2, 2, 4}, rng);
  const auto g = WindowGrid::make({2, 2, 2, 2}, {1, 2, 2, 2}, false);
  const auto windows = window_partition(x, g);
  ASSERT_EQ(windows.shape(), (Shape{2, 8, 4}));
  const auto y = window_reverse(wmsa_4d(windows, a, static_cast<const AttentionMask<double>*>(nullptr), nullptr), g);
  EXPECT_LT(max_abs_diff(y, naive_attention(x, a, g.window, g.shift, false)), 1e-10);
}

TEST(Wmsa, HeadDivisibilityIsChecked) {
  std::mt19937_64 rng(16);
  const auto a = random_attention(5, 2, nullptr, rng);
  EXPECT_THROW(wmsa_4d(random_tensor({1, 2, 5}, rng), a, static_cast<const AttentionMask<double>*>(nullptr), nullptr),
               ShapeError);
}

TEST(RelativeBias, SingleEntryAndDiagonal) {
  EXPECT_EQ(relative_table_size({1, 1, 1, 1}), 1);
  TD table({2, 1}, std::vector<double>{0.5, -2});
  const auto b = relative_bias_lookup(table, relative_position_index({1, 1, 1, 1}), 1);
  EXPECT_EQ(b.data()[0], 0.5);
  EXPECT_EQ(b.data()[1], -2);
  std::mt19937_64 rng(17);
  const Dims4 w{2, 3, 2, 2};
  const auto big = relative_bias_lookup(random_tensor({1, relative_table_size(w)}, rng), relative_position_index(w), 24);
  for (Index i = 0; i < 24; ++i) EXPECT_EQ(big.at({0, i, i}), big.at({0, 0, 0}));
}

TEST(RelativeBias, ExhaustiveCoordinateOracle) {
  const Dims4 w{2, 2, 2, 2};
  ASSERT_EQ(relative_table_size(w), 81);
  std::vector<double> entries(81);
  for (int i = 0; i < 81; ++i) entries[i] = i;
  const auto b = relative_bias_lookup(TD({1, 81}, entries), relative_position_index(w), 16);
  int checked = 0;
  for (Index i = 0; i < 16; ++i)
    for (Index j = 0; j < 16; ++j) {
      const Index dt = (i >> 3 & 1) - (j >> 3 & 1), dh = (i >> 2 & 1) - (j >> 2 & 1);
      const Index dw = (i >> 1 & 1) - (j >> 1 & 1), dd = (i & 1) - (j & 1);
      const Index want = (((dt + 1) * 3 + dh + 1) * 3 + dw + 1) * 3 + dd + 1;
      EXPECT_EQ(b.at({0, i, j}), double(want));
      ++checked;
    }
  EXPECT_EQ(checked, 256);
}

TEST(PatchEmbed, ZeroInputGivesBias) {
  std::mt19937_64 rng(18);
  Linear<double> e{random_tensor({8, 3}, rng), random_tensor({3}, rng)};
  const auto y = patch_embed(TD({2, 4, 4, 2, 1}), e, 2);
  ASSERT_EQ(y.shape(), (Shape{2, 2, 2, 1, 3}));
  for (Index i = 0; i < y.numel(); ++i) EXPECT_EQ(y.data()[i], e.bias.data()[i % 3]);
}

TEST(PatchEmbed, CubeDotProductOracle) {
  std::mt19937_64 rng(19);
  const Index c = 5;
  Linear<double> e{random_tensor({216, c}, rng), random_tensor({c}, rng)};
  const auto x = random_tensor({2, 6, 6, 6, 1}, rng);
  const auto y = patch_embed(x, e, 6);
  ASSERT_EQ(y.shape(), (Shape{2, 1, 1, 1, c}));
  for (Index t = 0; t < 2; ++t)
    for (Index j = 0; j < c; ++j) {
      double s = e.bias.data()[j];
      for (Index h = 0; h < 6; ++h)
        for (Index w = 0; w < 6; ++w)
          for (Index d = 0; d < 6; ++d) s += x.at({t, h, w, d, 0}) * e.weight.at({(h * 6 + w) * 6 + d, j});
      EXPECT_NEAR(y.at({t, 0, 0, 0, j}), s, 1e-12);
    }
}

TEST(PatchEmbed, FullSizeShapeAndDivisibility) {
  NoGradGuard g;
  Linear<float> e{Tensor<float>({216, 36}), Tensor<float>({36})};
  const auto y = patch_embed(Tensor<float>({20, 96, 96, 96, 1}), e, 6);
  EXPECT_EQ(y.shape(), (Shape{20, 16, 16, 16, 36}));
  EXPECT_THROW(patch_embed(Tensor<float>({1, 8, 6, 6, 1}), e, 6), ShapeError);
}

TEST(PatchMerge, ShapeAndTokenCount) {
  NoGradGuard g;
  Linear<float> r{Tensor<float>({288, 72}), Tensor<float>({72})};
  const auto y = patch_merge(Tensor<float>({20, 16, 16, 16, 36}), Tensor<float>({288}, 1.0f), Tensor<float>({288}),
                             r, 1e-5f);
  EXPECT_EQ(y.shape(), (Shape{20, 8, 8, 8, 72}));
  EXPECT_EQ(16 * 16 * 16 / (8 * 8 * 8), 8);
  EXPECT_THROW(patch_merge(Tensor<float>({1, 3, 2, 2, 1}), Tensor<float>({8}, 1.0f), Tensor<float>({8}),
                           Linear<float>{Tensor<float>({8, 2}), Tensor<float>({2})}, 1e-5f),
               ShapeError);
}

TEST(PatchMerge, GatherOrderWithIdentityProjection) {
  std::vector<double> v(8);
  for (int i = 0; i < 8; ++i) v[i] = i * i - 3.0 * i;  // distinct values
  const TD x({1, 2, 2, 2, 1}, v);
  TD eye({8, 8});
  for (int i = 0; i < 8; ++i) eye.mutable_data()[i * 9] = 1;
  const auto y = patch_merge(x, TD({8}, 1.0), TD({8}, 0.0), Linear<double>{eye, TD({8})}, 0.0);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 1, 1, 8}));
  // Channel k holds the voxel (dh, dw, dd) = bits of k, after normalization.
  double m = 0, var = 0;
  for (double e : v) m += e / 8;
  for (double e : v) var += (e - m) * (e - m) / 8;
  for (int k = 0; k < 8; ++k) {
    const double voxel = x.at({0, k >> 2 & 1, k >> 1 & 1, k & 1, 0});
    EXPECT_NEAR(y.data()[k], (voxel - m) / std::sqrt(var), 1e-12);
  }
}

TEST(PositionalEmbedding, BroadcastSemantics) {
  std::mt19937_64 rng(20);
  const auto x = random_tensor({3, 2, 2, 2, 4}, rng);
  EXPECT_TRUE(testing::bitwise_equal(add_positional_embedding(x, TD({1, 2, 2, 2, 4}), TD({3, 1, 1, 1, 4})), x));
  TD temporal({3, 1, 1, 1, 4});
  for (Index t = 0; t < 3; ++t)
    for (Index c = 0; c < 4; ++c) temporal.mutable_data()[t * 4 + c] = 0.5 * (t + 1);
  const auto shifted = add_positional_embedding(x, TD({1, 2, 2, 2, 4}), temporal);
  for (Index i = 0; i < x.numel(); ++i) EXPECT_DOUBLE_EQ(shifted.data()[i] - x.data()[i], 0.5 * (i / 32 + 1));
  const auto sp = random_tensor({1, 2, 2, 2, 4}, rng);
  const auto tp = random_tensor({3, 1, 1, 1, 4}, rng);
  const auto y = add_positional_embedding(x, sp, tp);
  for (Index t = 0; t < 3; ++t)
    for (Index h = 0; h < 2; ++h)
      for (Index w = 0; w < 2; ++w)
        for (Index d = 0; d < 2; ++d)
          for (Index c = 0; c < 4; ++c)
            EXPECT_EQ(y.at({t, h, w, d, c}), x.at({t, h, w, d, c}) + sp.at({0, h, w, d, c}) + tp.at({t, 0, 0, 0, c}));
  EXPECT_THROW(add_positional_embedding(x, TD({1, 2, 2, 1, 4}), tp), ShapeError);
}

TEST(PooledHead, PoolingOracles) {
  std::mt19937_64 rng(22);
  const auto constant = global_average_pool(TD({2, 2, 2, 2, 3}, 1.25));
  for (double v : constant.data()) EXPECT_DOUBLE_EQ(v, 1.25);
  const auto x = random_tensor({2, 3, 2, 2, 3}, rng);
  const auto p = global_average_pool(x);
  for (Index c = 0; c < 3; ++c) {
    double s = 0;
    for (Index i = 0; i < 24; ++i) s += x.data()[i * 3 + c];
    EXPECT_NEAR(p.data()[c], s / 24, 1e-12);
  }
  // Reversing the token order leaves the pooled vector unchanged.
  std::vector<Index> rev(24);
  for (Index i = 0; i < 24; ++i) rev[i] = 23 - i;
  const auto flipped = reshape(index_select(reshape(x, {24, 3}), 0, rev), {2, 3, 2, 2, 3});
  EXPECT_LT(max_abs_diff(global_average_pool(flipped), p), 1e-12);
}

TEST(SwinBlockPair, ZeroOutputProjectionsGiveIdentity) {
  std::mt19937_64 rng(23);
  const Dims4 window{2, 2, 2, 2};
  auto b0 = random_block(4, 2, 2, &window, rng);
  auto b1 = random_block(4, 2, 2, &window, rng);
  for (auto* b : {&b0, &b1}) {
    for (auto* t : {&b->attn.proj.weight, &b->attn.proj.bias, &b->fc2.weight, &b->fc2.bias})
      for (auto& v : t->mutable_data()) v = 0;
  }
  const auto z = random_tensor({3, 4, 2, 4, 4}, rng);
  const auto y = swin_block_pair(z, b0, b1, window, BlockOptions{});
  EXPECT_EQ(y.shape(), z.shape());
  EXPECT_TRUE(testing::bitwise_equal(y, z));
}

TEST(SwinBlockPair, ShapePreservedOnRaggedGrid) {
  std::mt19937_64 rng(24);
  const Dims4 window{2, 2, 2, 2};
  const auto b0 = random_block(6, 3, 4, &window, rng), b1 = random_block(6, 3, 4, &window, rng);
  const auto z = random_tensor({3, 5, 1, 3, 6}, rng);
  EXPECT_EQ(swin_block_pair(z, b0, b1, window, BlockOptions{}).shape(), z.shape());
}

TEST(SwinBlockPair, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(25);
  const Dims4 window{2, 4, 4, 4};
  auto b0 = random_block(8, 2, 2, &window, rng), b1 = random_block(8, 2, 2, &window, rng);
  std::vector<TD> leaves;
  for (auto* b : {&b0, &b1})
    for (auto* t : {&b->norm1_gamma, &b->norm1_beta, &b->attn.qkv.weight, &b->attn.qkv.bias, &b->attn.proj.weight,
                    &b->attn.proj.bias, &b->attn.relative_table, &b->norm2_gamma, &b->norm2_beta, &b->fc1.weight,
                    &b->fc1.bias, &b->fc2.weight, &b->fc2.bias})
      leaves.push_back(*t);
  const auto z = random_tensor({4, 8, 8, 8, 8}, rng);
  const auto w = random_tensor({4, 8, 8, 8, 8}, rng);
  auto loss = [&] { return sum(mul(swin_block_pair(z, b0, b1, window, BlockOptions{}), w)); };
  GradCheckOptions opt;
  opt.max_coords_per_tensor = 6;
  opt.seed = 3;
  const auto r = grad_check_leaves(loss, leaves, opt);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_GT(r.coords_checked, 100u);
}

TEST(GlobalAttention, SingleTokenIsValuePath) {
  std::mt19937_64 rng(26);
  auto b = random_block(4, 2, 2, nullptr, rng);
  const auto z = random_tensor({1, 1, 1, 1, 4}, rng);
  const auto windows = reshape(layer_norm(z, b.norm1_gamma, b.norm1_beta, 1e-5), {1, 1, 4});
  const auto attn = wmsa_4d(windows, b.attn, static_cast<const AttentionMask<double>*>(nullptr), nullptr);
  auto one_token = b;
  one_token.attn.qkv.weight = TD({4, 12});
  one_token.attn.qkv.bias = TD({12});
  // Same value/projection path with queries and keys zeroed out.
  for (Index k = 0; k < 4; ++k)
    for (Index j = 0; j < 4; ++j)
      one_token.attn.qkv.weight.mutable_data()[k * 12 + 8 + j] = b.attn.qkv.weight.at({k, 8 + j});
  for (Index j = 0; j < 4; ++j) one_token.attn.qkv.bias.mutable_data()[8 + j] = b.attn.qkv.bias.data()[8 + j];
  const auto attn2 = wmsa_4d(windows, one_token.attn, static_cast<const AttentionMask<double>*>(nullptr), nullptr);
  EXPECT_LT(max_abs_diff(attn, attn2), 1e-14);
}

}  // namespace
}  // namespace swin4d
