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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace swin4d {

// Half-sample symmetric reflection of i into [0, n).
std::int64_t reflect_index(std::int64_t i, std::int64_t n);

// Normalized Gaussian taps over [-ceil(3 sigma), ceil(3 sigma)].
std::vector<double> gaussian_kernel(double sigma);

// Separable Gaussian smoothing of one [H, W, D] volume in place, reflective
// boundary. sigma <= 0 leaves the volume unchanged.
template <typename T>
void gaussian_smooth_3d(std::span<T> volume, const std::array<std::int64_t, 3>& dims, double sigma);

}  // namespace swin4d
