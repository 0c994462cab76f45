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

#include "swin4d/analysis.hpp"
#include "swin4d/autodiff.hpp"
#include "swin4d/model.hpp"
#include "swin4d/ops.hpp"

namespace swin4d {
namespace {

Tensor<float> input_for(const ModelConfig& cfg) {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> n;
  const Dims4& d = cfg.input_dims;
  std::vector<float> v(static_cast<std::size_t>(d[0] * d[1] * d[2] * d[3]));
  for (auto& e : v) e = n(rng);
  return Tensor<float>({d[0], d[1], d[2], d[3], 1}, std::move(v));
}

ModelConfig preset(int which) { return which == 0 ? ModelConfig::tiny() : ModelConfig::desk(); }

void BM_Forward(benchmark::State& state) {
  const auto cfg = preset(static_cast<int>(state.range(0)));
  const SwinModel<float> model(cfg, 0);
  const auto x = input_for(cfg);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x));
  state.counters["flops"] = benchmark::Counter(static_cast<double>(flops_estimate(cfg).total),
                                               benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto cfg = preset(static_cast<int>(state.range(0)));
  SwinModel<float> model(cfg, 0);
  const auto x = input_for(cfg);
  for (auto _ : state) {
    model.zero_grad();
    backward(sum(model.forward(x)));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace swin4d
