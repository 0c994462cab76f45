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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "swin4d/tensor.hpp"

namespace swin4d::testing {

template <typename T = double>
Tensor<T> random_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<T> v(static_cast<std::size_t>(shape_numel(shape)));
  for (auto& e : v) e = static_cast<T>(n(rng));
  return Tensor<T>(std::move(shape), std::move(v));
}

template <typename T = double>
Tensor<T> random_leaf(Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  auto t = random_tensor<T>(std::move(shape), rng, scale);
  t.set_requires_grad(true);
  return t;
}

template <typename T>
double max_abs_diff(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
  return m;
}

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) return INFINITY;
  return max_abs_diff(a.data(), b.data());
}

template <typename T>
bool bitwise_equal(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) return false;
  for (Index i = 0; i < a.numel(); ++i)
    if (std::memcmp(&a.data()[i], &b.data()[i], sizeof(T)) != 0) return false;
  return true;
}

// Fresh empty directory for one test's files.
inline std::filesystem::path scratch_dir(const std::string& name) {
  std::filesystem::path root = std::filesystem::temp_directory_path();
  if (const char* env = std::getenv("SWIN4D_TEST_TMP")) root = env;
  const auto dir = root / ("swin4d_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace swin4d::testing
