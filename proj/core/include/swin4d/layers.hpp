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

#include <random>
#include <vector>

#include "swin4d/config.hpp"
#include "swin4d/tensor.hpp"
#include "swin4d/window.hpp"

namespace swin4d {

template <typename T>
struct Linear {
  Tensor<T> weight;  // [in, out]
  Tensor<T> bias;    // [out]
};

template <typename T>
struct AttentionParams {
  Linear<T> qkv;  // C -> 3C, laid out as [q | k | v], heads contiguous inside each
  Linear<T> proj;
  Tensor<T> relative_table;  // [heads, table entries]; undefined in absolute mode
  int heads = 1;
};

template <typename T>
struct BlockParams {
  Tensor<T> norm1_gamma, norm1_beta;
  AttentionParams<T> attn;
  Tensor<T> norm2_gamma, norm2_beta;
  Linear<T> fc1, fc2;
};

template <typename T>
struct HeadParams {
  Linear<T> fc1, fc2;
};

// Per-call switches shared by the block functions.
struct BlockOptions {
  Activation activation = Activation::kGelu;
  double layer_norm_eps = 1e-5;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;  // dropout only runs when set
};

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Linear<T>& layer);

template <typename T>
Tensor<T> activate(const Tensor<T>& x, Activation act);

// [T, H, W, D, 1] -> [T, H/p, W/p, D/p, C]; `embed` maps the p^3 voxels of a
// cube, flattened in (h, w, d) row-major order, to C channels.
template <typename T>
Tensor<T> patch_embed(const Tensor<T>& x, const Linear<T>& embed, Index patch_size);

// Multi-head attention inside each window:
// softmax(Q K^T / sqrt(d) + mask [+ B]) V, heads concatenated, then projected.
// `relative_index` selects B from attn.relative_table when that is defined.
template <typename T>
Tensor<T> wmsa_4d(const Tensor<T>& windows, const AttentionParams<T>& attn, const AttentionMask<T>* mask,
                  const std::vector<Index>* relative_index);

// One pre-norm block on the token grid: window attention on `grid`, then MLP.
template <typename T>
Tensor<T> swin_block(const Tensor<T>& z, const BlockParams<T>& p, const WindowGrid& grid,
                     const AttentionMask<T>& mask, const std::vector<Index>* relative_index,
                     const BlockOptions& opt);

// W-MSA block followed by an SW-MSA block.
template <typename T>
Tensor<T> swin_block_pair(const Tensor<T>& z, const BlockParams<T>& regular, const BlockParams<T>& shifted,
                          const Dims4& window, const BlockOptions& opt);

// Same residual structure, attention over every token of the grid.
template <typename T>
Tensor<T> global_attention_block(const Tensor<T>& z, const BlockParams<T>& p,
                                 const std::vector<Index>* relative_index, const BlockOptions& opt);

// Concatenates each 2x2x2 spatial neighbourhood into 8C channels, ordered
// (dh, dw, dd) row-major with channels fastest, layer-normalizes it and
// applies `reduction`.
template <typename T>
Tensor<T> patch_merge(const Tensor<T>& x, const Tensor<T>& norm_gamma, const Tensor<T>& norm_beta,
                      const Linear<T>& reduction, T eps);

// x + spatial[1, H, W, D, C] + temporal[T, 1, 1, 1, C], by broadcasting.
template <typename T>
Tensor<T> add_positional_embedding(const Tensor<T>& x, const Tensor<T>& spatial, const Tensor<T>& temporal);

// Mean over every token -> [C].
template <typename T>
Tensor<T> global_average_pool(const Tensor<T>& features);

// Pool, then fc1 -> activation -> fc2.
template <typename T>
Tensor<T> pooled_head(const Tensor<T>& features, const HeadParams<T>& head, Activation act);

}  // namespace swin4d
