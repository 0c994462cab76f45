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
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace swin4d {

using Index = std::int64_t;
using Shape = std::vector<Index>;

Index shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

enum class Precision { kSingle, kDouble };

template <typename T>
constexpr Precision precision_of() {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>, "float or double only");
  return std::is_same_v<T, float> ? Precision::kSingle : Precision::kDouble;
}

// Gradient recording is on by default. A NoGradGuard turns it off for the
// current thread until it goes out of scope.
bool grad_mode_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until the first accumulation
  bool requires_grad = false;
  bool is_leaf = true;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into the grads of `inputs`.
  std::function<void(Node&)> backward;

  std::vector<T>& grad_buffer() {
    if (grad.empty()) grad.assign(data.size(), T(0));
    return grad;
  }
};

}  // namespace detail

/// Dense row-major n-dimensional array with optional gradient tracking.
///
/// A Tensor is a cheap handle: copies share the underlying node. Operations in
/// ops.hpp never modify their inputs; they allocate a fresh node and, when any
/// input requires a gradient and grad mode is on, record a backward rule that
/// links the result to its inputs.
template <typename T>
class Tensor {
 public:
  using Scalar = T;
  using NodeType = detail::Node<T>;
  using NodePtr = std::shared_ptr<NodeType>;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> data);

  static Tensor scalar(T value) { return Tensor(Shape{}, std::vector<T>{value}); }
  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), T(0)); }
  static Tensor ones(Shape shape) { return Tensor(std::move(shape), T(1)); }
  static Tensor from_node(NodePtr node);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  int rank() const { return static_cast<int>(shape().size()); }
  Index dim(int axis) const;
  Index numel() const;

  std::span<const T> data() const;
  // Only leaves may be written in place (parameters under an optimizer).
  std::span<T> mutable_data();
  T item() const;
  T at(std::initializer_list<Index> index) const;

  bool requires_grad() const;
  Tensor& set_requires_grad(bool value);
  bool is_leaf() const;
  bool has_grad() const;
  std::span<const T> grad() const;
  std::span<T> mutable_grad();
  Tensor grad_tensor() const;
  void zero_grad();

  // A new leaf holding a copy of the data, cut from the graph.
  Tensor detach() const;
  template <typename U>
  Tensor<U> cast() const;

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

// Row-major flat offset of a multi-index.
Index flat_offset(const Shape& shape, std::span<const Index> index);
std::vector<Index> row_major_strides(const Shape& shape);
int normalize_axis(int axis, int rank);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace swin4d
