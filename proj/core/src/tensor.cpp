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

#include "swin4d/tensor.hpp"

#include <algorithm>
#include <sstream>

#include "swin4d/error.hpp"

namespace swin4d {

namespace {
thread_local bool t_grad_enabled = true;
}

bool grad_mode_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

Index shape_numel(const Shape& shape) {
  Index n = 1;
  for (Index e : shape) n *= e;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::vector<Index> row_major_strides(const Shape& shape) {
  std::vector<Index> strides(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) strides[i] = strides[i + 1] * shape[i + 1];
  return strides;
}

Index flat_offset(const Shape& shape, std::span<const Index> index) {
  if (index.size() != shape.size())
    throw ShapeError("index rank " + std::to_string(index.size()) + " does not match shape " + shape_to_string(shape));
  Index offset = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (index[i] < 0 || index[i] >= shape[i]) throw ShapeError("index out of range for shape " + shape_to_string(shape));
    offset = offset * shape[i] + index[i];
  }
  return offset;
}

int normalize_axis(int axis, int rank) {
  const int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank)
    throw ShapeError("axis " + std::to_string(axis) + " out of range for rank " + std::to_string(rank));
  return a;
}

namespace {
void check_extents(const Shape& shape) {
  for (Index e : shape)
    if (e <= 0) throw ShapeError("tensor extents must be positive, got " + shape_to_string(shape));
}
}  // namespace

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : node_(std::make_shared<NodeType>()) {
  check_extents(shape);
  node_->data.assign(static_cast<std::size_t>(shape_numel(shape)), fill);
  node_->shape = std::move(shape);
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : node_(std::make_shared<NodeType>()) {
  check_extents(shape);
  if (static_cast<Index>(data.size()) != shape_numel(shape))
    throw ShapeError("data length " + std::to_string(data.size()) + " does not match shape " + shape_to_string(shape));
  node_->shape = std::move(shape);
  node_->data = std::move(data);
}

template <typename T>
Tensor<T> Tensor<T>::from_node(NodePtr node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

template <typename T>
const Shape& Tensor<T>::shape() const {
  if (!node_) throw ValidationError("use of an undefined tensor");
  return node_->shape;
}

template <typename T>
Index Tensor<T>::dim(int axis) const {
  return shape()[normalize_axis(axis, rank())];
}

template <typename T>
Index Tensor<T>::numel() const {
  return static_cast<Index>(node_ ? node_->data.size() : 0);
}

template <typename T>
std::span<const T> Tensor<T>::data() const {
  shape();
  return node_->data;
}

template <typename T>
std::span<T> Tensor<T>::mutable_data() {
  shape();
  if (!node_->is_leaf) throw ValidationError("only leaf tensors can be modified in place");
  return node_->data;
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) throw ShapeError("item() needs a single-element tensor, got " + shape_to_string(shape()));
  return node_->data[0];
}

template <typename T>
T Tensor<T>::at(std::initializer_list<Index> index) const {
  return node_->data[flat_offset(shape(), std::span<const Index>(index.begin(), index.size()))];
}

template <typename T>
bool Tensor<T>::requires_grad() const {
  return node_ && node_->requires_grad;
}

template <typename T>
Tensor<T>& Tensor<T>::set_requires_grad(bool value) {
  shape();
  if (!node_->is_leaf) throw ValidationError("requires_grad can only be changed on leaf tensors");
  node_->requires_grad = value;
  return *this;
}

template <typename T>
bool Tensor<T>::is_leaf() const {
  return node_ && node_->is_leaf;
}

template <typename T>
bool Tensor<T>::has_grad() const {
  return node_ && !node_->grad.empty();
}

template <typename T>
std::span<const T> Tensor<T>::grad() const {
  if (!has_grad()) throw ValidationError("tensor has no gradient");
  return node_->grad;
}

template <typename T>
std::span<T> Tensor<T>::mutable_grad() {
  shape();
  return node_->grad_buffer();
}

template <typename T>
Tensor<T> Tensor<T>::grad_tensor() const {
  if (!has_grad()) return Tensor(shape(), T(0));
  return Tensor(shape(), node_->grad);
}

template <typename T>
void Tensor<T>::zero_grad() {
  if (node_) node_->grad.clear();
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(shape(), node_->data);
}

template <typename T>
template <typename U>
Tensor<U> Tensor<T>::cast() const {
  std::vector<U> out(node_->data.size());
  std::transform(node_->data.begin(), node_->data.end(), out.begin(), [](T v) { return static_cast<U>(v); });
  return Tensor<U>(shape(), std::move(out));
}

template class Tensor<float>;
template class Tensor<double>;
template Tensor<double> Tensor<float>::cast<double>() const;
template Tensor<float> Tensor<double>::cast<float>() const;
template Tensor<float> Tensor<float>::cast<float>() const;
template Tensor<double> Tensor<double>::cast<double>() const;

}  // namespace swin4d
