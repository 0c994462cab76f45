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

#include "swin4d/layers.hpp"

#include <cmath>

#include "swin4d/error.hpp"
#include "swin4d/ops.hpp"

namespace swin4d {

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Linear<T>& layer) {
  Tensor<T> y = matmul(x, layer.weight);
  return layer.bias.defined() ? broadcast_add(y, layer.bias) : y;
}

template <typename T>
Tensor<T> activate(const Tensor<T>& x, Activation act) {
  if (act == Activation::kGelu) return gelu(x);
  // relu(x) = (x + |x|) / 2 = x * 1[x > 0]
  std::vector<T> gate(x.numel());
  const auto xd = x.data();
  for (std::size_t i = 0; i < gate.size(); ++i) gate[i] = xd[i] > 0 ? T(1) : T(0);
  return mul(x, Tensor<T>(x.shape(), std::move(gate)));
}

template <typename T>
Tensor<T> patch_embed(const Tensor<T>& x, const Linear<T>& embed, Index p) {
  if (x.rank() != 5 || x.dim(4) != 1)
    throw ShapeError("patch_embed: expected [T, H, W, D, 1], got " + shape_to_string(x.shape()));
  const Index t = x.dim(0), h = x.dim(1), w = x.dim(2), d = x.dim(3);
  if (h % p || w % p || d % p)
    throw ShapeError("patch_embed: spatial extents " + shape_to_string(x.shape()) + " not divisible by patch size " +
                     std::to_string(p));
  if (embed.weight.dim(0) != p * p * p)
    throw ShapeError("patch_embed: projection expects " + std::to_string(embed.weight.dim(0)) + " inputs, patch has " +
                     std::to_string(p * p * p));
  Tensor<T> cubes = reshape(x, {t, h / p, p, w / p, p, d / p, p});
  cubes = permute(cubes, {0, 1, 3, 5, 2, 4, 6});
  cubes = reshape(cubes, {t, h / p, w / p, d / p, p * p * p});
  return linear(cubes, embed);
}

template <typename T>
Tensor<T> wmsa_4d(const Tensor<T>& windows, const AttentionParams<T>& attn, const AttentionMask<T>* mask,
                  const std::vector<Index>* relative_index) {
  if (windows.rank() != 3) throw ShapeError("wmsa_4d: expected [windows, L, C], got " + shape_to_string(windows.shape()));
  const Index nw = windows.dim(0), len = windows.dim(1), c = windows.dim(2);
  const Index heads = attn.heads;
  if (heads <= 0 || c % heads != 0)
    throw ShapeError("wmsa_4d: width " + std::to_string(c) + " not divisible by " + std::to_string(heads) + " heads");
  const Index d = c / heads;

  Tensor<T> qkv = reshape(linear(windows, attn.qkv), {nw, len, 3, heads, d});
  qkv = permute(qkv, {2, 0, 3, 1, 4});  // [3, nw, heads, L, d]
  auto part = [&](Index i) { return reshape(slice(qkv, 0, i, 1), {nw, heads, len, d}); };
  const Tensor<T> q = part(0), k = part(1), v = part(2);

  Tensor<T> scores = matmul(scale(q, T(1) / std::sqrt(T(d))), transpose_last2(k));  // [nw, heads, L, L]
  if (attn.relative_table.defined() && relative_index) {
    scores = broadcast_add(scores, reshape(relative_bias_lookup(attn.relative_table, *relative_index, len),
                                           {1, heads, len, len}));
  }
  if (mask && !mask->trivial) scores = broadcast_add(scores, reshape(mask->values, {nw, 1, len, len}));
  Tensor<T> out = matmul(softmax(scores, -1), v);  // [nw, heads, L, d]
  out = reshape(permute(out, {0, 2, 1, 3}), {nw, len, c});
  return linear(out, attn.proj);
}

namespace {

template <typename T>
Tensor<T> mlp_half(const Tensor<T>& z, const BlockParams<T>& p, const BlockOptions& opt) {
  Tensor<T> h = layer_norm(z, p.norm2_gamma, p.norm2_beta, T(opt.layer_norm_eps));
  h = linear(activate(linear(h, p.fc1), opt.activation), p.fc2);
  if (opt.rng && opt.dropout > 0) h = dropout(h, T(opt.dropout), *opt.rng);
  return add(z, h);
}

}  // namespace

template <typename T>
Tensor<T> swin_block(const Tensor<T>& z, const BlockParams<T>& p, const WindowGrid& grid,
                     const AttentionMask<T>& mask, const std::vector<Index>* relative_index,
                     const BlockOptions& opt) {
  Tensor<T> h = layer_norm(z, p.norm1_gamma, p.norm1_beta, T(opt.layer_norm_eps));
  h = window_reverse(wmsa_4d(window_partition(h, grid), p.attn, &mask, relative_index), grid);
  if (opt.rng && opt.dropout > 0) h = dropout(h, T(opt.dropout), *opt.rng);
  return mlp_half(add(z, h), p, opt);
}

template <typename T>
Tensor<T> swin_block_pair(const Tensor<T>& z, const BlockParams<T>& regular, const BlockParams<T>& shifted,
                          const Dims4& window, const BlockOptions& opt) {
  if (z.rank() != 5) throw ShapeError("swin_block_pair: expected [T, H, W, D, C], got " + shape_to_string(z.shape()));
  const Dims4 tokens{z.dim(0), z.dim(1), z.dim(2), z.dim(3)};
  const auto index = relative_position_index(window);
  const WindowGrid g0 = WindowGrid::make(tokens, window, false);
  const WindowGrid g1 = WindowGrid::make(tokens, window, true);
  Tensor<T> out = swin_block(z, regular, g0, build_shift_mask<T>(g0), &index, opt);
  return swin_block(out, shifted, g1, build_shift_mask<T>(g1), &index, opt);
}

template <typename T>
Tensor<T> global_attention_block(const Tensor<T>& z, const BlockParams<T>& p,
                                 const std::vector<Index>* relative_index, const BlockOptions& opt) {
  if (z.rank() != 5) throw ShapeError("global_attention_block: expected [T, H, W, D, C]");
  const Index c = z.dim(4);
  Tensor<T> h = layer_norm(z, p.norm1_gamma, p.norm1_beta, T(opt.layer_norm_eps));
  h = reshape(wmsa_4d(reshape(h, {1, z.numel() / c, c}), p.attn, static_cast<const AttentionMask<T>*>(nullptr), relative_index), z.shape());
  if (opt.rng && opt.dropout > 0) h = dropout(h, T(opt.dropout), *opt.rng);
  return mlp_half(add(z, h), p, opt);
}

template <typename T>
Tensor<T> patch_merge(const Tensor<T>& x, const Tensor<T>& norm_gamma, const Tensor<T>& norm_beta,
                      const Linear<T>& reduction, T eps) {
  if (x.rank() != 5) throw ShapeError("patch_merge: expected [T, H, W, D, C], got " + shape_to_string(x.shape()));
  const Index t = x.dim(0), h = x.dim(1), w = x.dim(2), d = x.dim(3), c = x.dim(4);
  if (h % 2 || w % 2 || d % 2)
    throw ShapeError("patch_merge: spatial extents must be even, got " + shape_to_string(x.shape()));
  Tensor<T> g = reshape(x, {t, h / 2, 2, w / 2, 2, d / 2, 2, c});
  g = permute(g, {0, 1, 3, 5, 2, 4, 6, 7});
  g = reshape(g, {t, h / 2, w / 2, d / 2, 8 * c});
  return linear(layer_norm(g, norm_gamma, norm_beta, eps), reduction);
}

template <typename T>
Tensor<T> add_positional_embedding(const Tensor<T>& x, const Tensor<T>& spatial, const Tensor<T>& temporal) {
  if (x.rank() != 5) throw ShapeError("add_positional_embedding: expected [T, H, W, D, C]");
  const Shape& s = x.shape();
  const Shape want_spatial{1, s[1], s[2], s[3], s[4]};
  const Shape want_temporal{s[0], 1, 1, 1, s[4]};
  if (spatial.shape() != want_spatial || temporal.shape() != want_temporal)
    throw ShapeError("add_positional_embedding: embeddings " + shape_to_string(spatial.shape()) + " / " +
                     shape_to_string(temporal.shape()) + " do not fit tokens " + shape_to_string(s));
  return broadcast_add(broadcast_add(x, spatial), temporal);
}

template <typename T>
Tensor<T> global_average_pool(const Tensor<T>& features) {
  const Index c = features.dim(-1);
  return mean_axis(reshape(features, {features.numel() / c, c}), 0);
}

template <typename T>
Tensor<T> pooled_head(const Tensor<T>& features, const HeadParams<T>& head, Activation act) {
  const Index c = features.dim(-1);
  Tensor<T> h = reshape(global_average_pool(features), {1, c});
  h = linear(activate(linear(h, head.fc1), act), head.fc2);
  return reshape(h, {h.dim(1)});
}

#define SWIN4D_INSTANTIATE_LAYERS(T)                                                                              \
  template Tensor<T> linear(const Tensor<T>&, const Linear<T>&);                                                  \
  template Tensor<T> activate(const Tensor<T>&, Activation);                                                      \
  template Tensor<T> patch_embed(const Tensor<T>&, const Linear<T>&, Index);                                      \
  template Tensor<T> wmsa_4d(const Tensor<T>&, const AttentionParams<T>&, const AttentionMask<T>*,                \
                             const std::vector<Index>*);                                                          \
  template Tensor<T> swin_block(const Tensor<T>&, const BlockParams<T>&, const WindowGrid&,                       \
                                const AttentionMask<T>&, const std::vector<Index>*, const BlockOptions&);         \
  template Tensor<T> swin_block_pair(const Tensor<T>&, const BlockParams<T>&, const BlockParams<T>&,              \
                                     const Dims4&, const BlockOptions&);                                          \
  template Tensor<T> global_attention_block(const Tensor<T>&, const BlockParams<T>&, const std::vector<Index>*,   \
                                            const BlockOptions&);                                                 \
  template Tensor<T> patch_merge(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const Linear<T>&, T);                    \
  template Tensor<T> add_positional_embedding(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> global_average_pool(const Tensor<T>&);                                                       \
  template Tensor<T> pooled_head(const Tensor<T>&, const HeadParams<T>&, Activation);

SWIN4D_INSTANTIATE_LAYERS(float)
SWIN4D_INSTANTIATE_LAYERS(double)

#undef SWIN4D_INSTANTIATE_LAYERS

}  // namespace swin4d
