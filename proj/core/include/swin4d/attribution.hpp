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
#include <string>
#include <vector>

#include "swin4d/data.hpp"
#include "swin4d/model.hpp"
#include "swin4d/tensor.hpp"

namespace swin4d {

template <typename T>
struct AttributionMap {
  Tensor<T> values;  // same shape as the input
  std::string baseline;
  int steps = 0;
  double noise_sigma = 0.0;
  int samples = 0;
};

template <typename T>
using ScalarFunction = std::function<Tensor<T>(const Tensor<T>&)>;

// (x - b) * mean_k dF/dx at b + (k - 1/2) / steps * (x - b), k = 1..steps.
template <typename T>
AttributionMap<T> integrated_gradients(const ScalarFunction<T>& f, const Tensor<T>& x, const Tensor<T>& baseline,
                                       int steps);

// Mean over samples of IG(x + N(0, noise_sigma^2))^2.
template <typename T>
AttributionMap<T> ig_sq(const ScalarFunction<T>& f, const Tensor<T>& x, const Tensor<T>& baseline, int steps,
                        double noise_sigma, int n_samples, std::uint64_t seed = 0);

// The model's scalar output as a function of its input.
template <typename T>
ScalarFunction<T> model_output(const SwinModel<T>& model);

// Constant volume at the minimum of x (the normalized background value).
template <typename T>
Tensor<T> background_baseline(const Tensor<T>& x);

struct GroupMap {
  Dims3 dims{};
  std::vector<double> values;
};

// Keeps maps whose subject was predicted correctly, min-max normalizes each
// map to [0, 1] (constant maps become 0), smooths every frame spatially,
// averages over time and then over subjects. Maps are read as [T, H, W, D, ...].
template <typename T>
GroupMap aggregate_maps(const std::vector<AttributionMap<T>>& maps, const std::vector<bool>& correct,
                        double smooth_sigma);

// Mean map value inside the blob over the mean value elsewhere.
double localization_factor(const GroupMap& map, const BlobGeometry& blob);

}  // namespace swin4d
