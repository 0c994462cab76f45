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
#include <functional>
#include <span>
#include <vector>

#include "swin4d/tensor.hpp"

namespace swin4d {

/// Nodes reachable from a root, in topological order (inputs first).
///
/// Only nodes that take part in gradient flow are recorded. A reverse sweep
/// over `nodes()` visits every node exactly once.
template <typename T>
class ComputationTape {
 public:
  using NodePtr = typename Tensor<T>::NodePtr;

  static ComputationTape record(const Tensor<T>& root);

  std::span<const NodePtr> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds the root with ones and runs every backward rule in reverse order.
  void sweep();

 private:
  std::vector<NodePtr> nodes_;
};

// Populates grads of every tracked leaf reachable from `loss`. Leaf grads
// accumulate across calls until zero_grad().
template <typename T>
void backward(const Tensor<T>& loss);

struct GradCheckOptions {
  double eps = 1e-5;
  // Zero checks every coordinate; otherwise a seeded random subset per tensor.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coords_checked = 0;
  std::size_t worst_tensor = 0;
  Index worst_coord = 0;
};

// Central finite differences against the tape's analytic gradient.
// Error per coordinate: |analytic - numeric| / max(1, |numeric|).
double grad_check(const std::function<Tensor<double>(const Tensor<double>&)>& f, const Tensor<double>& x,
                  double eps = 1e-5);

// Same measure over a set of leaves that `loss` closes over. The leaves are
// perturbed in place and restored.
GradCheckResult grad_check_leaves(const std::function<Tensor<double>()>& loss, std::span<Tensor<double>> leaves,
                                  const GradCheckOptions& options = {});

extern template class ComputationTape<float>;
extern template class ComputationTape<double>;

}  // namespace swin4d
