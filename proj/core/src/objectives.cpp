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

#include "swin4d/objectives.hpp"

#include <cmath>

#include "swin4d/error.hpp"
#include "swin4d/ops.hpp"

namespace swin4d {

template <typename T>
Tensor<T> bce_loss(const Tensor<T>& logits, const std::vector<double>& labels) {
  if (static_cast<std::size_t>(logits.numel()) != labels.size())
    throw ShapeError("bce_loss: " + std::to_string(logits.numel()) + " logits for " + std::to_string(labels.size()) +
                     " labels");
  std::vector<T> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0)
      throw ValidationError("bce_loss: label must be 0 or 1, got " + std::to_string(labels[i]));
    y[i] = static_cast<T>(labels[i]);
  }
  const Tensor<T> flat = reshape(logits, {logits.numel()});
  const Tensor<T> target({logits.numel()}, std::move(y));
  return mean(sub(softplus(flat), mul(target, flat)));
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.numel() != target.numel()) throw ShapeError("mse_loss: prediction and target sizes differ");
  return mean(square(sub(reshape(pred, {pred.numel()}), reshape(target, {target.numel()}))));
}

namespace {

template <typename T>
void check_nonzero(const Tensor<T>& v, const char* where) {
  for (T x : v.data())
    if (x != T(0)) return;
  throw ValidationError(std::string(where) + ": zero vector has no cosine similarity");
}

// Rows of `f` scaled to unit length.
template <typename T>
Tensor<T> normalize_rows(const Tensor<T>& f) {
  return broadcast_div(f, sqrt(sum_axis(square(f), 1, true)));
}

// Per-anchor -log(num/den) for anchors 0..n-1 of the stacked [2n, D] matrix,
// positives at n+i and negatives at every j != i and n+j, j != i.
template <typename T>
Tensor<T> anchor_terms(const Tensor<T>& stacked, Index n, Index anchor_offset, Index positive_offset, double temperature) {
  const Index m = stacked.dim(0);
  const Tensor<T> unit = normalize_rows(stacked);
  const Tensor<T> logits = scale(matmul(unit, transpose_last2(unit)), T(1.0 / temperature));
  const Tensor<T> h = exp(logits);
  const Tensor<T> flat_logits = reshape(logits, {m * m});
  const Tensor<T> flat_h = reshape(h, {m * m});
  std::vector<Index> anchors(n), pos(n), self(n);
  for (Index i = 0; i < n; ++i) {
    const Index a = anchor_offset + i;
    anchors[i] = a;
    pos[i] = a * m + positive_offset + i;
    self[i] = a * m + a;
  }
  // Both views of subject i are excluded from its own denominator.
  const Tensor<T> rows = index_select(sum_axis(h, 1), 0, anchors);
  const Tensor<T> den = sub(sub(rows, index_select(flat_h, 0, self)), index_select(flat_h, 0, pos));
  return sub(log(den), index_select(flat_logits, 0, pos));
}

template <typename T>
void check_batch(const ContrastiveBatch<T>& batch, ContrastiveMode mode, const char* where) {
  if (batch.mode != mode) throw ValidationError(std::string(where) + ": wrong batch mode");
  if (batch.first.size() != batch.second.size())
    throw ShapeError(std::string(where) + ": views have different counts");
  if (batch.first.size() < 2)
    throw ValidationError(std::string(where) + ": need at least 2 " +
                          (mode == ContrastiveMode::kInstance ? "subjects" : "sub-sequences"));
  const Index dim = batch.first.front().numel();
  for (const auto* views : {&batch.first, &batch.second})
    for (const auto& f : *views) {
      if (f.numel() != dim) throw ShapeError(std::string(where) + ": embedding dimensions differ");
      check_nonzero(f, where);
    }
}

template <typename T>
Tensor<T> stack_views(const ContrastiveBatch<T>& batch) {
  std::vector<Tensor<T>> rows;
  for (const auto* views : {&batch.first, &batch.second})
    for (const auto& f : *views) rows.push_back(reshape(f, {f.numel()}));
  return stack(rows);
}

}  // namespace

template <typename T>
Tensor<T> cos_exp(const Tensor<T>& u, const Tensor<T>& v, double temperature) {
  if (u.numel() != v.numel()) throw ShapeError("cos_exp: vector lengths differ");
  check_nonzero(u, "cos_exp");
  check_nonzero(v, "cos_exp");
  const Tensor<T> a = reshape(u, {u.numel()});
  const Tensor<T> b = reshape(v, {v.numel()});
  const Tensor<T> cosine = div(sum(mul(a, b)), sqrt(mul(sum(square(a)), sum(square(b)))));
  return exp(scale(cosine, T(1.0 / temperature)));
}

template <typename T>
Tensor<T> instance_contrastive_loss(const ContrastiveBatch<T>& batch, const ContrastiveOptions& opt) {
  check_batch(batch, ContrastiveMode::kInstance, "instance_contrastive_loss");
  const Index n = static_cast<Index>(batch.first.size());
  const Tensor<T> stacked = stack_views(batch);
  Tensor<T> loss = mean(anchor_terms(stacked, n, 0, n, opt.temperature));
  if (opt.symmetric) {
    // Anchors f(i,2): swap the halves so the same indexing applies.
    std::vector<Index> swap(2 * n);
    for (Index i = 0; i < n; ++i) {
      swap[i] = n + i;
      swap[n + i] = i;
    }
    const Tensor<T> reverse = mean(anchor_terms(index_select(stacked, 0, swap), n, 0, n, opt.temperature));
    loss = scale(add(loss, reverse), T(0.5));
  }
  return loss;
}

template <typename T>
Tensor<T> local_local_loss(const ContrastiveBatch<T>& batch, const ContrastiveOptions& opt) {
  check_batch(batch, ContrastiveMode::kLocalLocal, "local_local_loss");
  const Index n = static_cast<Index>(batch.first.size());
  return sum(anchor_terms(stack_views(batch), n, 0, n, opt.temperature));
}

template <typename T>
Tensor<T> local_local_loss(const std::vector<ContrastiveBatch<T>>& subjects, const ContrastiveOptions& opt) {
  if (subjects.empty()) throw ValidationError("local_local_loss: no subjects");
  std::vector<Tensor<T>> terms;
  for (const auto& s : subjects) terms.push_back(local_local_loss(s, opt));
  return mean(stack(terms));
}

template <typename T>
Tensor<T> combined_pretrain_loss(const Tensor<T>& ic, const Tensor<T>& ll) {
  return add(ic, ll);
}

#define SWIN4D_INSTANTIATE_OBJECTIVES(T)                                                                 \
  template Tensor<T> bce_loss(const Tensor<T>&, const std::vector<double>&);                             \
  template Tensor<T> mse_loss(const Tensor<T>&, const Tensor<T>&);                                       \
  template Tensor<T> cos_exp(const Tensor<T>&, const Tensor<T>&, double);                                \
  template Tensor<T> instance_contrastive_loss(const ContrastiveBatch<T>&, const ContrastiveOptions&);   \
  template Tensor<T> local_local_loss(const ContrastiveBatch<T>&, const ContrastiveOptions&);            \
  template Tensor<T> local_local_loss(const std::vector<ContrastiveBatch<T>>&, const ContrastiveOptions&); \
  template Tensor<T> combined_pretrain_loss(const Tensor<T>&, const Tensor<T>&);

SWIN4D_INSTANTIATE_OBJECTIVES(float)
SWIN4D_INSTANTIATE_OBJECTIVES(double)

}  // namespace swin4d
