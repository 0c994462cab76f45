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

#include "swin4d/tensor.hpp"

// Differentiable tensor operations. Every function returns a new tensor and,
// when gradients are being recorded, attaches the matching backward rule.
namespace swin4d {

// a[..., m, k] x b[..., k, n] -> [..., m, n]. Leading batch extents follow
// numpy broadcasting; a rank-2 `b` is shared by every batch of `a`.
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

// Elementwise ops on identical shapes.
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b);

// Explicit broadcasting variants (right-aligned, each extent equal or 1).
template <typename T>
Tensor<T> broadcast_add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> broadcast_mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> broadcast_div(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor);
template <typename T>
Tensor<T> add_scalar(const Tensor<T>& x, T value);
template <typename T>
Tensor<T> neg(const Tensor<T>& x);

template <typename T>
Tensor<T> exp(const Tensor<T>& x);
template <typename T>
Tensor<T> log(const Tensor<T>& x);
template <typename T>
Tensor<T> sqrt(const Tensor<T>& x);
template <typename T>
Tensor<T> square(const Tensor<T>& x);
// log(1 + e^x), evaluated without overflow.
template <typename T>
Tensor<T> softplus(const Tensor<T>& x);
// tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
template <typename T>
Tensor<T> gelu(const Tensor<T>& x);

// Max-subtracted softmax along `axis`.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, int axis);

// Normalizes over the last axis, then applies gamma * xhat + beta.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, T eps);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape new_shape);
// Output axis i is input axis order[i].
template <typename T>
Tensor<T> permute(const Tensor<T>& x, const std::vector<int>& order);
template <typename T>
Tensor<T> transpose_last2(const Tensor<T>& x);

// Circular shift: out[(i + s) mod n] = x[i] along each axis. `shifts` covers the
// leading axes; missing trailing entries are zero.
template <typename T>
Tensor<T> roll(const Tensor<T>& x, const std::vector<Index>& shifts);

// Zero-pads at the end of each leading axis.
template <typename T>
Tensor<T> pad_trailing(const Tensor<T>& x, const std::vector<Index>& pads);
// Copies the block [starts, starts + extents).
template <typename T>
Tensor<T> slice_block(const Tensor<T>& x, const std::vector<Index>& starts, const Shape& extents);
template <typename T>
Tensor<T> slice(const Tensor<T>& x, int axis, Index start, Index length);

// Gathers entries along `axis`; indices may repeat (the backward pass sums).
template <typename T>
Tensor<T> index_select(const Tensor<T>& x, int axis, const std::vector<Index>& indices);

// Stacks equally shaped tensors along a new leading axis.
template <typename T>
Tensor<T> stack(const std::vector<Tensor<T>>& parts);

template <typename T>
Tensor<T> sum(const Tensor<T>& x);
template <typename T>
Tensor<T> mean(const Tensor<T>& x);
template <typename T>
Tensor<T> sum_axis(const Tensor<T>& x, int axis, bool keepdim = false);
template <typename T>
Tensor<T> mean_axis(const Tensor<T>& x, int axis, bool keepdim = false);

// Inverted dropout. A rate of zero returns `x` unchanged.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, T rate, std::mt19937_64& rng);

}  // namespace swin4d
