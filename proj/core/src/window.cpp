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

#include "swin4d/window.hpp"

#include "swin4d/error.hpp"
#include "swin4d/ops.hpp"

namespace swin4d {

WindowGrid WindowGrid::make(const Dims4& token_dims, const Dims4& window, bool shifted) {
  WindowGrid g;
  g.token_dims = token_dims;
  g.window = window;
  for (int a = 0; a < 4; ++a) {
    if (token_dims[a] <= 0 || window[a] <= 0)
      throw ShapeError("WindowGrid: extents must be positive, tokens " + dims_to_string(token_dims) + " window " +
                       dims_to_string(window));
    g.counts[a] = (token_dims[a] + window[a] - 1) / window[a];
    g.pad[a] = g.counts[a] * window[a] - token_dims[a];
    g.shift[a] = shifted ? window[a] / 2 : 0;
  }
  return g;
}

Dims4 WindowGrid::padded_dims() const {
  return {token_dims[0] + pad[0], token_dims[1] + pad[1], token_dims[2] + pad[2], token_dims[3] + pad[3]};
}

Index WindowGrid::num_windows() const { return counts[0] * counts[1] * counts[2] * counts[3]; }

Index WindowGrid::window_volume() const { return window[0] * window[1] * window[2] * window[3]; }

bool WindowGrid::shifted() const { return shift[0] || shift[1] || shift[2] || shift[3]; }

bool WindowGrid::padded() const { return pad[0] || pad[1] || pad[2] || pad[3]; }

template <typename T>
Tensor<T> window_partition(const Tensor<T>& x, const WindowGrid& grid) {
  if (x.rank() != 5)
    throw ShapeError("window_partition: expected [T, H, W, D, C], got " + shape_to_string(x.shape()));
  for (int a = 0; a < 4; ++a)
    if (x.shape()[a] != grid.token_dims[a])
      throw ShapeError("window_partition: tokens " + shape_to_string(x.shape()) + " do not match grid " +
                       dims_to_string(grid.token_dims));
  const Index c = x.dim(4);
  Tensor<T> h = pad_trailing(x, {grid.pad[0], grid.pad[1], grid.pad[2], grid.pad[3], 0});
  if (grid.shifted()) h = roll(h, {-grid.shift[0], -grid.shift[1], -grid.shift[2], -grid.shift[3]});
  const auto& n = grid.counts;
  const auto& w = grid.window;
  h = reshape(h, {n[0], w[0], n[1], w[1], n[2], w[2], n[3], w[3], c});
  h = permute(h, {0, 2, 4, 6, 1, 3, 5, 7, 8});
  return reshape(h, {grid.num_windows(), grid.window_volume(), c});
}

template <typename T>
Tensor<T> window_reverse(const Tensor<T>& windows, const WindowGrid& grid) {
  if (windows.rank() != 3 || windows.dim(0) != grid.num_windows() || windows.dim(1) != grid.window_volume())
    throw ShapeError("window_reverse: windows " + shape_to_string(windows.shape()) + " do not match grid");
  const Index c = windows.dim(2);
  const auto& n = grid.counts;
  const auto& w = grid.window;
  Tensor<T> h = reshape(windows, {n[0], n[1], n[2], n[3], w[0], w[1], w[2], w[3], c});
  h = permute(h, {0, 4, 1, 5, 2, 6, 3, 7, 8});
  const Dims4 p = grid.padded_dims();
  h = reshape(h, {p[0], p[1], p[2], p[3], c});
  if (grid.shifted()) h = roll(h, {grid.shift[0], grid.shift[1], grid.shift[2], grid.shift[3]});
  const auto& t = grid.token_dims;
  return slice_block(h, {0, 0, 0, 0, 0}, {t[0], t[1], t[2], t[3], c});
}

template <typename T>
AttentionMask<T> build_shift_mask(const WindowGrid& grid) {
  const Dims4 p = grid.padded_dims();
  // Per axis and window-frame position: region label, and whether the token
  // that lands there is padding.
  std::array<std::vector<int>, 4> region;
  std::array<std::vector<bool>, 4> is_pad;
  for (int a = 0; a < 4; ++a) {
    region[a].resize(p[a]);
    is_pad[a].resize(p[a]);
    const Index s = grid.shift[a];
    for (Index r = 0; r < p[a]; ++r) {
      int label = 0;
      if (s > 0) label = r < p[a] - grid.window[a] ? 0 : (r < p[a] - s ? 1 : 2);
      region[a][r] = label;
      is_pad[a][r] = (r + s) % p[a] >= grid.token_dims[a];
    }
  }
  const Index nw = grid.num_windows();
  const Index len = grid.window_volume();
  const auto& w = grid.window;
  const auto& n = grid.counts;
  std::vector<int> label(nw * len);
  std::vector<char> pad(nw * len);
  bool any = false;
  for (Index i0 = 0; i0 < n[0]; ++i0)
    for (Index i1 = 0; i1 < n[1]; ++i1)
      for (Index i2 = 0; i2 < n[2]; ++i2)
        for (Index i3 = 0; i3 < n[3]; ++i3) {
          const Index win = ((i0 * n[1] + i1) * n[2] + i2) * n[3] + i3;
          for (Index j0 = 0; j0 < w[0]; ++j0)
            for (Index j1 = 0; j1 < w[1]; ++j1)
              for (Index j2 = 0; j2 < w[2]; ++j2)
                for (Index j3 = 0; j3 < w[3]; ++j3) {
                  const Index pos[4] = {i0 * w[0] + j0, i1 * w[1] + j1, i2 * w[2] + j2, i3 * w[3] + j3};
                  const Index slot = win * len + ((j0 * w[1] + j1) * w[2] + j2) * w[3] + j3;
                  int id = 0;
                  bool padded = false;
                  for (int a = 0; a < 4; ++a) {
                    id = id * 3 + region[a][pos[a]];
                    padded = padded || is_pad[a][pos[a]];
                  }
                  label[slot] = id;
                  pad[slot] = padded;
                  any = any || padded || id != 0;
                }
        }
  AttentionMask<T> mask;
  mask.trivial = !any;
  std::vector<T> values(nw * len * len, T(0));
  if (any) {
    const T fill = mask_fill_value<T>();
    for (Index win = 0; win < nw; ++win)
      for (Index q = 0; q < len; ++q)
        for (Index k = 0; k < len; ++k) {
          const Index a = win * len + q, b = win * len + k;
          if (label[a] != label[b] || pad[a] || pad[b]) values[(win * len + q) * len + k] = fill;
        }
  }
  mask.values = Tensor<T>({nw, len, len}, std::move(values));
  return mask;
}

Index relative_table_size(const Dims4& window) {
  return (2 * window[0] - 1) * (2 * window[1] - 1) * (2 * window[2] - 1) * (2 * window[3] - 1);
}

std::vector<Index> relative_position_index(const Dims4& window) {
  const Index len = window[0] * window[1] * window[2] * window[3];
  std::vector<std::array<Index, 4>> coords(len);
  for (Index i = 0; i < len; ++i) {
    Index r = i;
    for (int a = 3; a >= 0; --a) {
      coords[i][a] = r % window[a];
      r /= window[a];
    }
  }
  std::vector<Index> index(len * len);
  for (Index q = 0; q < len; ++q)
    for (Index k = 0; k < len; ++k) {
      Index flat = 0;
      for (int a = 0; a < 4; ++a) flat = flat * (2 * window[a] - 1) + (coords[q][a] - coords[k][a] + window[a] - 1);
      index[q * len + k] = flat;
    }
  return index;
}

template <typename T>
Tensor<T> relative_bias_lookup(const Tensor<T>& table, const std::vector<Index>& index, Index window_volume) {
  if (table.rank() != 2) throw ShapeError("relative_bias_lookup: table must be [heads, entries]");
  if (static_cast<Index>(index.size()) != window_volume * window_volume)
    throw ShapeError("relative_bias_lookup: index map does not match window volume");
  const Index heads = table.dim(0);
  return reshape(index_select(table, 1, index), {heads, window_volume, window_volume});
}

template Tensor<float> window_partition(const Tensor<float>&, const WindowGrid&);
template Tensor<double> window_partition(const Tensor<double>&, const WindowGrid&);
template Tensor<float> window_reverse(const Tensor<float>&, const WindowGrid&);
template Tensor<double> window_reverse(const Tensor<double>&, const WindowGrid&);
template AttentionMask<float> build_shift_mask(const WindowGrid&);
template AttentionMask<double> build_shift_mask(const WindowGrid&);
template Tensor<float> relative_bias_lookup(const Tensor<float>&, const std::vector<Index>&, Index);
template Tensor<double> relative_bias_lookup(const Tensor<double>&, const std::vector<Index>&, Index);

}  // namespace swin4d
