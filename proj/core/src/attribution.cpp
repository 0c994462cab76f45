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

#include "swin4d/attribution.hpp"

#include <algorithm>
#include <random>

#include "swin4d/autodiff.hpp"
#include "swin4d/error.hpp"
#include "swin4d/filters.hpp"
#include "swin4d/ops.hpp"

namespace swin4d {

template <typename T>
AttributionMap<T> integrated_gradients(const ScalarFunction<T>& f, const Tensor<T>& x, const Tensor<T>& baseline,
                                       int steps) {
  if (steps < 1) throw ValidationError("integrated_gradients: steps must be at least 1");
  if (x.shape() != baseline.shape())
    throw ShapeError("integrated_gradients: baseline " + shape_to_string(baseline.shape()) + " vs input " +
                     shape_to_string(x.shape()));
  const auto xv = x.data();
  const auto bv = baseline.data();
  const std::size_t n = xv.size();
  std::vector<double> grad_sum(n, 0.0);
  std::vector<T> point(n);
  for (int k = 1; k <= steps; ++k) {
    const double alpha = (static_cast<double>(k) - 0.5) / static_cast<double>(steps);
    for (std::size_t j = 0; j < n; ++j) point[j] = static_cast<T>(bv[j] + alpha * (xv[j] - bv[j]));
    Tensor<T> leaf(x.shape(), point);
    leaf.set_requires_grad(true);
    const Tensor<T> out = f(leaf);
    if (out.numel() != 1) throw ShapeError("integrated_gradients: function must return a scalar");
    backward(out);
    if (!leaf.has_grad()) continue;
    const auto g = leaf.grad();
    for (std::size_t j = 0; j < n; ++j) grad_sum[j] += static_cast<double>(g[j]);
  }
  std::vector<T> ig(n);
  for (std::size_t j = 0; j < n; ++j)
    ig[j] = static_cast<T>((static_cast<double>(xv[j]) - bv[j]) * grad_sum[j] / static_cast<double>(steps));
  AttributionMap<T> map;
  map.values = Tensor<T>(x.shape(), std::move(ig));
  map.baseline = "given";
  map.steps = steps;
  return map;
}

template <typename T>
AttributionMap<T> ig_sq(const ScalarFunction<T>& f, const Tensor<T>& x, const Tensor<T>& baseline, int steps,
                        double noise_sigma, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw ValidationError("ig_sq: n_samples must be at least 1");
  if (noise_sigma < 0) throw ValidationError("ig_sq: noise_sigma must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, noise_sigma > 0 ? noise_sigma : 1.0);
  const std::size_t n = static_cast<std::size_t>(x.numel());
  std::vector<double> acc(n, 0.0);
  std::vector<T> noisy(n);
  for (int s = 0; s < n_samples; ++s) {
    for (std::size_t j = 0; j < n; ++j) noisy[j] = static_cast<T>(x.data()[j] + (noise_sigma > 0 ? normal(rng) : 0.0));
    const auto ig = integrated_gradients(f, Tensor<T>(x.shape(), noisy), baseline, steps);
    const auto v = ig.values.data();
    for (std::size_t j = 0; j < n; ++j) acc[j] += static_cast<double>(v[j]) * static_cast<double>(v[j]);
  }
  std::vector<T> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = static_cast<T>(acc[j] / n_samples);
  AttributionMap<T> map;
  map.values = Tensor<T>(x.shape(), std::move(out));
  map.baseline = "given";
  map.steps = steps;
  map.noise_sigma = noise_sigma;
  map.samples = n_samples;
  return map;
}

template <typename T>
ScalarFunction<T> model_output(const SwinModel<T>& model) {
  if (model.config().output_dim() != 1) throw ValidationError("attribution needs a scalar model head");
  return [&model](const Tensor<T>& x) { return sum(model.forward(x)); };
}

template <typename T>
Tensor<T> background_baseline(const Tensor<T>& x) {
  if (x.numel() == 0) throw ShapeError("background_baseline: empty input");
  const auto v = x.data();
  return Tensor<T>(x.shape(), *std::min_element(v.begin(), v.end()));
}

template <typename T>
GroupMap aggregate_maps(const std::vector<AttributionMap<T>>& maps, const std::vector<bool>& correct,
                        double smooth_sigma) {
  if (maps.size() != correct.size()) throw ValidationError("aggregate_maps: one correctness flag per map");
  GroupMap group;
  std::size_t kept = 0;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    if (!correct[m]) continue;
    const Tensor<T>& t = maps[m].values;
    if (t.rank() < 4) throw ShapeError("aggregate_maps: maps must be at least [T, H, W, D]");
    for (std::size_t a = 4; a < t.shape().size(); ++a)
      if (t.dim(static_cast<int>(a)) != 1) throw ShapeError("aggregate_maps: trailing axes must be 1");
    const Dims3 dims{t.dim(1), t.dim(2), t.dim(3)};
    if (kept == 0) {
      group.dims = dims;
      group.values.assign(static_cast<std::size_t>(dims[0] * dims[1] * dims[2]), 0.0);
    } else if (dims != group.dims) {
      throw ShapeError("aggregate_maps: maps have different spatial shapes");
    }
    const auto v = t.data();
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, range = static_cast<double>(*hi_it) - lo;
    const std::size_t frame = group.values.size();
    const Index frames = t.dim(0);
    std::vector<double> buf(frame);
    for (Index f = 0; f < frames; ++f) {
      for (std::size_t i = 0; i < frame; ++i)
        buf[i] = range > 0 ? (static_cast<double>(v[f * frame + i]) - lo) / range : 0.0;
      gaussian_smooth_3d(std::span<double>(buf), dims, smooth_sigma);
      for (std::size_t i = 0; i < frame; ++i) group.values[i] += buf[i] / static_cast<double>(frames);
    }
    ++kept;
  }
  if (kept == 0) throw ValidationError("aggregate_maps: every subject was filtered out");
  for (double& x : group.values) x /= static_cast<double>(kept);
  return group;
}

double localization_factor(const GroupMap& map, const BlobGeometry& blob) {
  double in = 0, out = 0, n_in = 0, n_out = 0;
  for (Index h = 0, i = 0; h < map.dims[0]; ++h)
    for (Index w = 0; w < map.dims[1]; ++w)
      for (Index d = 0; d < map.dims[2]; ++d, ++i) {
        if (blob.inside(h, w, d)) {
          in += map.values[i];
          n_in += 1;
        } else {
          out += map.values[i];
          n_out += 1;
        }
      }
  if (n_in == 0 || n_out == 0) throw ValidationError("localization_factor: blob covers none or all of the map");
  return (in / n_in) / (out / n_out);
}

#define SWIN4D_INSTANTIATE_ATTRIBUTION(T)                                                                         \
  template AttributionMap<T> integrated_gradients(const ScalarFunction<T>&, const Tensor<T>&, const Tensor<T>&,   \
                                                  int);                                                           \
  template AttributionMap<T> ig_sq(const ScalarFunction<T>&, const Tensor<T>&, const Tensor<T>&, int, double, int, \
                                   std::uint64_t);                                                                \
  template ScalarFunction<T> model_output(const SwinModel<T>&);                                                   \
  template Tensor<T> background_baseline(const Tensor<T>&);                                                       \
  template GroupMap aggregate_maps(const std::vector<AttributionMap<T>>&, const std::vector<bool>&, double);

SWIN4D_INSTANTIATE_ATTRIBUTION(float)
SWIN4D_INSTANTIATE_ATTRIBUTION(double)

}  // namespace swin4d
