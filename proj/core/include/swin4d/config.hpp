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

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "swin4d/tensor.hpp"

namespace swin4d {

// (T, H, W, D) extents; for windows, (P_t, M, M, M).
using Dims4 = std::array<Index, 4>;

std::string dims_to_string(const Dims4& dims);

enum class PosEmbedMode { kAbsolute, kRelative };
enum class HeadKind { kBinaryLogit, kScalarRegression, kEmbedding };
enum class Activation { kGelu, kRelu };

std::string to_string(PosEmbedMode mode);
std::string to_string(HeadKind kind);
std::string to_string(Activation act);
PosEmbedMode parse_pos_embed_mode(const std::string& text);
HeadKind parse_head_kind(const std::string& text);
Activation parse_activation(const std::string& text);

inline constexpr int kNumStages = 4;

/// Architectural hyperparameters of the four-stage model.
///
/// Stage s (0-based) works on C * 2^s channels and (H / patch_size) / 2^s
/// tokens per spatial axis; the temporal axis is never merged. Stages 0-2 use
/// (shifted) window attention, the last stage uses global attention.
struct ModelConfig {
  Dims4 input_dims{8, 24, 24, 24};
  Index patch_size = 3;
  Index channels = 8;
  std::array<int, kNumStages> depths{2, 2, 2, 2};
  Dims4 window{2, 2, 2, 2};
  std::array<int, kNumStages> heads{2, 2, 4, 4};
  int mlp_ratio = 4;
  PosEmbedMode pos_embed = PosEmbedMode::kAbsolute;
  HeadKind head = HeadKind::kBinaryLogit;
  Index embedding_dim = 32;
  // Hidden width of the two-layer head; 0 means the final stage width.
  Index head_hidden = 0;
  Activation activation = Activation::kGelu;
  double layer_norm_eps = 1e-5;
  double dropout = 0.0;

  // 20x96^3 input, P=6, C=36, depths {2,2,6,2}, 4^4 windows.
  static ModelConfig full();
  // Default for training and end-to-end runs on one CPU.
  static ModelConfig desk();
  // Smallest configuration that exercises every stage; used for gradient checks.
  static ModelConfig tiny();

  // Throws ConfigError naming the offending field.
  void validate() const;

  Index stage_channels(int stage) const;
  Dims4 stage_tokens(int stage) const;
  Dims4 shift() const;
  Index window_volume() const;
  Index output_dim() const;
  Index head_hidden_width() const;
  bool operator==(const ModelConfig&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat key/value view of a config, as stored in checkpoint headers.
KeyValues to_key_values(const ModelConfig& cfg);
// Applies recognized keys to `cfg`; returns the keys it did not recognize.
std::vector<std::string> apply_key_values(ModelConfig& cfg, const KeyValues& kv);

}  // namespace swin4d
