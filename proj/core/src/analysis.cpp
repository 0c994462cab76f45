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

#include "swin4d/analysis.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "swin4d/error.hpp"
#include "swin4d/model.hpp"
#include "swin4d/window.hpp"

namespace swin4d {

Index partition_segments(Index dim, Index window, Index shift) {
  if (dim < 1 || window < 1 || shift < 0) throw ValidationError("partition_segments: extents must be positive");
  // Boundaries at shift + k * window; count the non-empty pieces of [0, dim).
  std::vector<Index> cuts{0};
  for (Index b = shift % window; b < dim; b += window)
    if (b > 0) cuts.push_back(b);
  cuts.push_back(dim);
  Index segments = 0;
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] > cuts[i - 1]) ++segments;
  return segments;
}

WindowCounts count_windows(const Dims4& token_dims, const Dims4& window) {
  WindowCounts c{1, 1};
  for (int a = 0; a < 4; ++a) {
    if (token_dims[a] < 1 || window[a] < 1) throw ValidationError("count_windows: extents must be positive");
    c.regular *= (token_dims[a] + window[a] - 1) / window[a];
    c.shifted *= partition_segments(token_dims[a], window[a], window[a] / 2);
  }
  return c;
}

ComplexityTerms complexity_terms(std::int64_t n, std::int64_t c, std::int64_t p, std::int64_t m) {
  return {12 * n * c * c, 2 * p * m * m * m * n * c, 2 * n * n * c};
}

FlopsReport flops_estimate(const ModelConfig& cfg) {
  cfg.validate();
  FlopsReport r;
  for (int s = 0; s < kNumStages; ++s) {
    const Dims4 tokens = cfg.stage_tokens(s);
    const std::int64_t n = tokens[0] * tokens[1] * tokens[2] * tokens[3];
    const std::int64_t c = cfg.stage_channels(s);
    const bool global = s == kNumStages - 1;
    const auto terms = complexity_terms(n, c, cfg.window[0], cfg.window[1]);
    std::int64_t stage_total = 0;
    for (int b = 0; b < cfg.depths[s]; ++b) {
      FlopsBlock blk{s + 1, b, global, n, c, terms.linear, global ? terms.global : terms.windowed};
      stage_total += blk.total();
      r.blocks.push_back(blk);
    }
    r.stage_totals.push_back(stage_total);
    r.total += stage_total;
  }
  return r;
}

ParamReport param_count(const ModelConfig& cfg) {
  cfg.validate();
  ParamReport r;
  std::vector<std::pair<std::string, Index>> modules{{"patch_embed", 0}, {"merge", 0},     {"pos_embed", 0},
                                                     {"norm", 0},        {"attention", 0}, {"relative_bias", 0},
                                                     {"mlp", 0},         {"head", 0}};
  auto add = [&](const std::string& name, Index count, const std::string& module) {
    r.entries.emplace_back(name, count);
    for (auto& [m, total] : modules)
      if (m == module) total += count;
    r.total += count;
  };
  const Index p = cfg.patch_size, c0 = cfg.channels;
  add("patch_embed.weight", p * p * p * c0, "patch_embed");
  add("patch_embed.bias", c0, "patch_embed");
  for (int s = 0; s < kNumStages; ++s) {
    const std::string sp = "stages." + std::to_string(s);
    const Index c = cfg.stage_channels(s);
    const Dims4 t = cfg.stage_tokens(s);
    if (s > 0) {
      add(sp + ".merge.norm.gamma", 8 * cfg.stage_channels(s - 1), "merge");
      add(sp + ".merge.norm.beta", 8 * cfg.stage_channels(s - 1), "merge");
      add(sp + ".merge.weight", 8 * cfg.stage_channels(s - 1) * c, "merge");
      add(sp + ".merge.bias", c, "merge");
    }
    if (cfg.pos_embed == PosEmbedMode::kAbsolute) {
      add(sp + ".pos_embed.spatial", t[1] * t[2] * t[3] * c, "pos_embed");
      add(sp + ".pos_embed.temporal", t[0] * c, "pos_embed");
    }
    const Dims4 span = s == kNumStages - 1 ? t : cfg.window;
    const Index offsets = (2 * span[0] - 1) * (2 * span[1] - 1) * (2 * span[2] - 1) * (2 * span[3] - 1);
    const Index hidden = c * cfg.mlp_ratio;
    for (int b = 0; b < cfg.depths[s]; ++b) {
      const std::string bp = sp + ".blocks." + std::to_string(b);
      add(bp + ".norm1.gamma", c, "norm");
      add(bp + ".norm1.beta", c, "norm");
      add(bp + ".attn.qkv.weight", 3 * c * c, "attention");
      add(bp + ".attn.qkv.bias", 3 * c, "attention");
      add(bp + ".attn.proj.weight", c * c, "attention");
      add(bp + ".attn.proj.bias", c, "attention");
      if (cfg.pos_embed == PosEmbedMode::kRelative)
        add(bp + ".attn.relative_table", cfg.heads[s] * offsets, "relative_bias");
      add(bp + ".norm2.gamma", c, "norm");
      add(bp + ".norm2.beta", c, "norm");
      add(bp + ".mlp.fc1.weight", c * hidden, "mlp");
      add(bp + ".mlp.fc1.bias", hidden, "mlp");
      add(bp + ".mlp.fc2.weight", hidden * c, "mlp");
      add(bp + ".mlp.fc2.bias", c, "mlp");
    }
  }
  const Index c_last = cfg.stage_channels(kNumStages - 1), hid = cfg.head_hidden_width(), out = cfg.output_dim();
  add("norm.gamma", c_last, "norm");
  add("norm.beta", c_last, "norm");
  add("head.fc1.weight", c_last * hid, "head");
  add("head.fc1.bias", hid, "head");
  add("head.fc2.weight", hid * out, "head");
  add("head.fc2.bias", out, "head");
  r.modules = std::move(modules);
  return r;
}

ReceptiveField receptive_field(const ModelConfig& cfg) {
  cfg.validate();
  ReceptiveField rf;
  const Index full_spatial = std::max({cfg.input_dims[1], cfg.input_dims[2], cfg.input_dims[3]});
  for (int s = 0; s < kNumStages; ++s) {
    StageSpan span;
    span.stage = s + 1;
    span.global = s == kNumStages - 1;
    if (span.global) {
      span.spatial = full_spatial;
      span.temporal = cfg.input_dims[0];
    } else {
      span.spatial = cfg.window[1] * cfg.patch_size * (Index{1} << s);
      span.temporal = cfg.window[0];
    }
    if (!rf.full_spatial_stage && span.spatial >= full_spatial) rf.full_spatial_stage = span.stage;
    if (!rf.full_temporal_stage && span.temporal >= cfg.input_dims[0]) rf.full_temporal_stage = span.stage;
    rf.stages.push_back(span);
  }
  return rf;
}

ThroughputReport throughput_bench(const ModelConfig& cfg, std::int64_t n_samples, int warmup, int repetitions,
                                  std::uint64_t seed) {
  if (n_samples < 1) throw ValidationError("throughput_bench: n_samples must be positive");
  if (repetitions < 1 || warmup < 0) throw ValidationError("throughput_bench: bad repetition or warm-up count");
  const SwinModel<float> model(cfg, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  const Dims4& d = cfg.input_dims;
  std::vector<float> values(static_cast<std::size_t>(d[0] * d[1] * d[2] * d[3]));
  for (float& v : values) v = normal(rng);
  const Tensor<float> x({d[0], d[1], d[2], d[3], 1}, values);
  NoGradGuard no_grad;
  for (int i = 0; i < warmup; ++i) model.forward(x);
  ThroughputReport r;
  r.n_samples = n_samples;
  r.repetitions = repetitions;
  r.flops_per_sample = flops_estimate(cfg).total;
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::int64_t i = 0; i < n_samples; ++i) model.forward(x);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.samples_per_second.push_back(static_cast<double>(n_samples) / secs);
  }
  const double n = static_cast<double>(repetitions);
  r.mean = std::accumulate(r.samples_per_second.begin(), r.samples_per_second.end(), 0.0) / n;
  double var = 0;
  for (double v : r.samples_per_second) var += (v - r.mean) * (v - r.mean);
  r.stddev = repetitions > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  return r;
}

}  // namespace swin4d
