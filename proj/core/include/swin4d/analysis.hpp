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
#include <string>
#include <utility>
#include <vector>

#include "swin4d/config.hpp"

namespace swin4d {

struct WindowCounts {
  Index regular = 0;
  Index shifted = 0;
};

// Non-empty segments of [0, dim) cut at s, s + window, s + 2 window, ...
// with s = window / 2 (the shifted partition); s = 0 gives the regular one.
Index partition_segments(Index dim, Index window, Index shift);
WindowCounts count_windows(const Dims4& token_dims, const Dims4& window);

// Per-block cost terms for N tokens of width C with a P x M^3 window:
// linear = 12 N C^2, windowed = 2 P M^3 N C, global = 2 N^2 C.
struct ComplexityTerms {
  std::int64_t linear = 0;
  std::int64_t windowed = 0;
  std::int64_t global = 0;
};
ComplexityTerms complexity_terms(std::int64_t n_tokens, std::int64_t channels, std::int64_t window_t,
                                 std::int64_t window_m);

struct FlopsBlock {
  int stage = 0;  // 1-based
  int block = 0;
  bool global = false;
  std::int64_t n_tokens = 0;
  std::int64_t channels = 0;
  std::int64_t term_linear = 0;
  std::int64_t term_attention = 0;
  std::int64_t total() const { return term_linear + term_attention; }
};

struct FlopsReport {
  std::vector<FlopsBlock> blocks;
  std::vector<std::int64_t> stage_totals;
  std::int64_t total = 0;
};
FlopsReport flops_estimate(const ModelConfig& cfg);

struct ParamReport {
  // Same names and order as the model's parameter manifest.
  std::vector<std::pair<std::string, Index>> entries;
  std::vector<std::pair<std::string, Index>> modules;
  Index total = 0;
};
// Closed-form count, independent of model construction.
ParamReport param_count(const ModelConfig& cfg);

struct StageSpan {
  int stage = 0;  // 1-based
  bool global = false;
  Index spatial = 0;   // voxels per spatial axis
  Index temporal = 0;  // frames
};

struct ReceptiveField {
  std::vector<StageSpan> stages;
  // First 1-based stage whose span covers the input; 0 if none does.
  int full_spatial_stage = 0;
  int full_temporal_stage = 0;
};
ReceptiveField receptive_field(const ModelConfig& cfg);

struct ThroughputReport {
  std::int64_t n_samples = 0;
  int repetitions = 0;
  std::vector<double> samples_per_second;
  double mean = 0.0;
  double stddev = 0.0;
  std::int64_t flops_per_sample = 0;
};
// Single-precision forward passes on random inputs, timed per repetition.
ThroughputReport throughput_bench(const ModelConfig& cfg, std::int64_t n_samples, int warmup, int repetitions = 5,
                                  std::uint64_t seed = 0);

}  // namespace swin4d
