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

#include "swin4d/filters.hpp"

#include <cmath>
#include <string>

#include "swin4d/error.hpp"

namespace swin4d {

std::int64_t reflect_index(std::int64_t i, std::int64_t n) {
  const std::int64_t period = 2 * n;
  std::int64_t r = i % period;
  if (r < 0) r += period;
  return r < n ? r : period - 1 - r;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0)) return {1.0};
  const auto radius = static_cast<std::int64_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double total = 0;
  for (std::int64_t i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (double& v : k) v /= total;
  return k;
}

template <typename T>
void gaussian_smooth_3d(std::span<T> volume, const std::array<std::int64_t, 3>& dims, double sigma) {
  const std::int64_t n = dims[0] * dims[1] * dims[2];
  if (static_cast<std::int64_t>(volume.size()) != n) throw ShapeError("gaussian_smooth_3d: size does not match dims");
  if (!(sigma > 0)) return;
  const auto kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<std::int64_t>(kernel.size() / 2);
  const std::array<std::int64_t, 3> strides{dims[1] * dims[2], dims[2], 1};
  std::vector<double> line, out;
  for (int axis = 0; axis < 3; ++axis) {
    const std::int64_t len = dims[axis], stride = strides[axis];
    line.resize(static_cast<std::size_t>(len));
    out.resize(static_cast<std::size_t>(len));
    for (std::int64_t base = 0; base < n; ++base) {
      // Visit each line once, from its first element.
      if ((base / stride) % len != 0) continue;
      for (std::int64_t i = 0; i < len; ++i) line[i] = static_cast<double>(volume[base + i * stride]);
      for (std::int64_t i = 0; i < len; ++i) {
        double acc = 0;
        for (std::int64_t k = -radius; k <= radius; ++k) acc += kernel[k + radius] * line[reflect_index(i + k, len)];
        out[i] = acc;
      }
      for (std::int64_t i = 0; i < len; ++i) volume[base + i * stride] = static_cast<T>(out[i]);
    }
  }
}

template void gaussian_smooth_3d(std::span<float>, const std::array<std::int64_t, 3>&, double);
template void gaussian_smooth_3d(std::span<double>, const std::array<std::int64_t, 3>&, double);

}  // namespace swin4d
