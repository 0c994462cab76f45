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

#include <vector>

#include "swin4d/config.hpp"
#include "swin4d/tensor.hpp"

namespace swin4d {

/// Partition of a T x H' x W' x D' token grid into P_t x M x M x M windows.
///
/// The grid is zero-padded at the trailing end of each axis up to a multiple
/// of the window. A shifted grid rolls the padded tokens by -shift before
/// tiling, so window k along an axis holds padded positions
/// [k*w + s, (k+1)*w + s) modulo the padded extent.
struct WindowGrid {
  Dims4 token_dims{};
  Dims4 window{};
  Dims4 shift{};
  Dims4 pad{};
  Dims4 counts{};

  // shift is all zero (regular) or window / 2 per axis (shifted).
  static WindowGrid make(const Dims4& token_dims, const Dims4& window, bool shifted);

  Dims4 padded_dims() const;
  Index num_windows() const;
  Index window_volume() const;
  bool shifted() const;
  bool padded() const;
};

// [T, H', W', D', C] -> [num_windows, P_t*M^3, C]. Windows are ordered
// row-major over (t, h, w, d) window indices; tokens inside a window likewise.
template <typename T>
Tensor<T> window_partition(const Tensor<T>& x, const WindowGrid& grid);

// Exact inverse of window_partition: untile, roll back and drop the padding.
template <typename T>
Tensor<T> window_reverse(const Tensor<T>& windows, const WindowGrid& grid);

/// Additive attention mask, one L x L block per window.
template <typename T>
struct AttentionMask {
  Tensor<T> values;  // [num_windows, L, L], 0 or mask_fill_value<T>()
  bool trivial = true;
};

template <typename T>
constexpr T mask_fill_value() {
  return std::is_same_v<T, float> ? T(-1e4) : T(-1e9);
}

// Region label of each window slot, per axis: 0, 1 or 2 for the three
// segments a shifted axis splits into, plus a padding flag. Pairs whose
// labels differ, or that involve a padded slot, are forbidden.
template <typename T>
AttentionMask<T> build_shift_mask(const WindowGrid& grid);

// Flat index into a per-head table of (2P_t-1)(2M-1)^3 entries for every
// (query, key) pair of a window; L*L entries, row-major.
std::vector<Index> relative_position_index(const Dims4& window);
Index relative_table_size(const Dims4& window);

// table [heads, relative_table_size] -> B [heads, L, L].
template <typename T>
Tensor<T> relative_bias_lookup(const Tensor<T>& table, const std::vector<Index>& index, Index window_volume);

}  // namespace swin4d
