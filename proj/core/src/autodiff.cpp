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

#include "swin4d/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "swin4d/error.hpp"

namespace swin4d {

template <typename T>
ComputationTape<T> ComputationTape<T>::record(const Tensor<T>& root) {
  ComputationTape tape;
  if (!root.requires_grad()) return tape;
  // Iterative post-order DFS; a node is emitted after all of its inputs.
  std::unordered_set<const typename Tensor<T>::NodeType*> visited;
  std::vector<std::pair<NodePtr, std::size_t>> stack;
  stack.emplace_back(root.node(), 0);
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      NodePtr child = node->inputs[next++];
      if (child->requires_grad && visited.insert(child.get()).second) stack.emplace_back(std::move(child), 0);
    } else {
      tape.nodes_.push_back(node);
      stack.pop_back();
    }
  }
  return tape;
}

template <typename T>
void ComputationTape<T>::sweep() {
  if (nodes_.empty()) return;
  for (auto& node : nodes_)
    if (!node->is_leaf) node->grad.assign(node->data.size(), T(0));
  auto& root = nodes_.back();
  auto& seed = root->grad_buffer();
  std::fill(seed.begin(), seed.end(), T(1));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    auto& node = **it;
    if (node.is_leaf || !node.backward) continue;
    node.backward(node);
    // Interior gradients are consumed exactly once.
    if (&node != root.get()) std::vector<T>().swap(node.grad);
  }
}

template <typename T>
void backward(const Tensor<T>& loss) {
  if (loss.numel() != 1) throw ShapeError("backward needs a scalar loss, got shape " + shape_to_string(loss.shape()));
  if (!loss.requires_grad()) return;
  ComputationTape<T>::record(loss).sweep();
}

double grad_check(const std::function<Tensor<double>(const Tensor<double>&)>& f, const Tensor<double>& x,
                  double eps) {
  Tensor<double> leaf = x.detach();
  leaf.set_requires_grad(true);
  std::vector<Tensor<double>> leaves{leaf};
  GradCheckOptions options;
  options.eps = eps;
  return grad_check_leaves([&] { return f(leaves[0]); }, leaves, options).max_relative_error;
}

GradCheckResult grad_check_leaves(const std::function<Tensor<double>()>& loss, std::span<Tensor<double>> leaves,
                                  const GradCheckOptions& options) {
  for (auto& leaf : leaves) {
    if (!leaf.is_leaf()) throw ValidationError("grad_check_leaves: every tensor must be a leaf");
    leaf.set_requires_grad(true);
    leaf.zero_grad();
  }
  const Tensor<double> out = loss();
  if (out.numel() != 1) throw ShapeError("grad_check: function must be scalar-valued");
  backward(out);

  GradCheckResult result;
  std::mt19937_64 rng(options.seed);
  for (std::size_t t = 0; t < leaves.size(); ++t) {
    auto& leaf = leaves[t];
    const Index n = leaf.numel();
    const std::vector<double> analytic = leaf.has_grad() ? std::vector<double>(leaf.grad().begin(), leaf.grad().end())
                                                         : std::vector<double>(n, 0.0);
    std::vector<Index> coords(n);
    std::iota(coords.begin(), coords.end(), Index{0});
    if (options.max_coords_per_tensor > 0 && coords.size() > options.max_coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_tensor);
    }
    auto values = leaf.mutable_data();
    for (Index c : coords) {
      const double saved = values[c];
      double plus = 0, minus = 0;
      {
        NoGradGuard no_grad;
        values[c] = saved + options.eps;
        plus = loss().item();
        values[c] = saved - options.eps;
        minus = loss().item();
      }
      values[c] = saved;
      const double numeric = (plus - minus) / (2 * options.eps);
      const double err = std::abs(analytic[c] - numeric) / std::max(1.0, std::abs(numeric));
      if (!(err <= result.max_relative_error)) {
        result.max_relative_error = std::isnan(err) ? INFINITY : err;
        result.worst_tensor = t;
        result.worst_coord = c;
      }
      ++result.coords_checked;
    }
  }
  return result;
}

template class ComputationTape<float>;
template class ComputationTape<double>;
template void backward(const Tensor<float>&);
template void backward(const Tensor<double>&);

}  // namespace swin4d
