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

#include "swin4d/tensor.hpp"

namespace swin4d {

// Mean binary cross-entropy over a batch of logits, in the stable
// softplus(x) - y*x form. Labels must be 0 or 1.
template <typename T>
Tensor<T> bce_loss(const Tensor<T>& logits, const std::vector<double>& labels);

// Mean squared error over a batch.
template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target);

// exp(cos(u, v) / temperature). Zero vectors are rejected.
template <typename T>
Tensor<T> cos_exp(const Tensor<T>& u, const Tensor<T>& v, double temperature = 1.0);

enum class ContrastiveMode { kInstance, kLocalLocal };

// Instance mode: first[i] = f(i,1), second[i] = f(i,2) for subjects i.
// Local-local mode: first[p] = f(p), second[p] = the same sub-sequence under
// another augmentation, for the sub-sequences p of one subject.
template <typename T>
struct ContrastiveBatch {
  ContrastiveMode mode = ContrastiveMode::kInstance;
  std::vector<Tensor<T>> first;
  std::vector<Tensor<T>> second;
};

struct ContrastiveOptions {
  double temperature = 1.0;
  // Instance loss only: also anchor on f(i,2) and average both directions.
  bool symmetric = false;
};

// Mean over subjects of -log h(f(i,1), f(i,2)) / sum_{j != i} [h(f(i,1), f(j,1)) + h(f(i,1), f(j,2))].
// The positive pair is not part of the denominator.
template <typename T>
Tensor<T> instance_contrastive_loss(const ContrastiveBatch<T>& batch, const ContrastiveOptions& opt = {});

// Sum over p of -log h(f(p), f~(p)) / sum_{q != p} [h(f(p), f(q)) + h(f(p), f~(q))] for one subject.
template <typename T>
Tensor<T> local_local_loss(const ContrastiveBatch<T>& batch, const ContrastiveOptions& opt = {});

// Mean of local_local_loss over subjects.
template <typename T>
Tensor<T> local_local_loss(const std::vector<ContrastiveBatch<T>>& subjects, const ContrastiveOptions& opt = {});

template <typename T>
Tensor<T> combined_pretrain_loss(const Tensor<T>& ic, const Tensor<T>& ll);

}  // namespace swin4d
