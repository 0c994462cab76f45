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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "swin4d/layers.hpp"
#include "swin4d/ops.hpp"
#include "swin4d/window.hpp"

namespace swin4d {
namespace {

Tensor<float> random_tensor(Shape shape, std::mt19937_64& rng, float scale = 1.0f) {
  std::normal_distribution<float> n(0.0f, scale);
  std::vector<float> v(static_cast<std::size_t>(shape_numel(shape)));
  for (auto& e : v) e = n(rng);
  return Tensor<float>(std::move(shape), std::move(v));
}

void BM_Matmul(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(1);
  const auto a = random_tensor({n, n}, rng), b = random_tensor({n, n}, rng);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * 2 * n * n * n);
}
BENCHMARK(BM_Matmul)->RangeMultiplier(2)->Range(32, 256);

void BM_SoftmaxRows(benchmark::State& state) {
  const Index rows = state.range(0);
  std::mt19937_64 rng(2);
  const auto x = random_tensor({rows, 128}, rng);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(softmax(x, 1));
  state.SetItemsProcessed(state.iterations() * rows * 128);
}
BENCHMARK(BM_SoftmaxRows)->Arg(64)->Arg(1024);

void BM_LayerNorm(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto x = random_tensor({4096, 36}, rng);
  const Tensor<float> gamma({36}, 1.0f), beta({36}, 0.0f);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(layer_norm(x, gamma, beta, 1e-5f));
}
BENCHMARK(BM_LayerNorm);

// Window attention on an 8x8x8x8 token grid, 2x4x4x4 windows, C = 16.
void BM_WindowAttention(benchmark::State& state) {
  const bool shifted = state.range(0) != 0;
  std::mt19937_64 rng(4);
  const Index c = 16;
  const Dims4 tokens{8, 8, 8, 8}, window{2, 4, 4, 4};
  const auto x = random_tensor({8, 8, 8, 8, c}, rng);
  AttentionParams<float> attn;
  attn.heads = 2;
  attn.qkv = {random_tensor({c, 3 * c}, rng, 0.1f), random_tensor({3 * c}, rng, 0.1f)};
  attn.proj = {random_tensor({c, c}, rng, 0.1f), random_tensor({c}, rng, 0.1f)};
  const auto grid = WindowGrid::make(tokens, window, shifted);
  const auto mask = build_shift_mask<float>(grid);
  NoGradGuard guard;
  for (auto _ : state)
    benchmark::DoNotOptimize(window_reverse(wmsa_4d(window_partition(x, grid), attn, shifted ? &mask : nullptr, nullptr), grid));
  state.SetItemsProcessed(state.iterations() * 8 * 8 * 8 * 8);
}
BENCHMARK(BM_WindowAttention)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace swin4d
