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
#include <random>
#include <string>
#include <vector>

#include "swin4d/config.hpp"
#include "swin4d/layers.hpp"
#include "swin4d/tensor.hpp"
#include "swin4d/window.hpp"

namespace swin4d {

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

/// The four-stage windowed-attention network and its parameters.
///
/// forward(): patch embedding, then per stage an optional 2x2x2 merge, the
/// absolute positional embedding (absolute mode) and the stage's blocks, then
/// a final LayerNorm, global average pooling and a two-layer head. Blocks at even positions use
/// the regular window grid, odd positions the shifted one; the last stage
/// attends globally.
///
/// Copies are deep (see clone()); the model is not copyable by assignment.
template <typename T>
class SwinModel {
 public:
  explicit SwinModel(ModelConfig cfg, std::uint64_t seed = 0);
  SwinModel(SwinModel&&) noexcept = default;
  SwinModel& operator=(SwinModel&&) noexcept = default;
  SwinModel(const SwinModel&) = delete;
  SwinModel& operator=(const SwinModel&) = delete;

  SwinModel clone() const;
  template <typename U>
  SwinModel<U> cast() const;

  const ModelConfig& config() const { return cfg_; }

  // x: [T, H, W, D, 1] -> [output_dim]. Dropout runs only when `rng` is set.
  Tensor<T> forward(const Tensor<T>& x, std::mt19937_64* rng = nullptr) const;
  // Normalized stage-4 feature map [T, H', W', D', 8C].
  Tensor<T> features(const Tensor<T>& x, std::mt19937_64* rng = nullptr) const;

  // Ordered parameter manifest. Handles alias the tensors used by forward().
  std::span<const NamedTensor<T>> parameters() const { return params_; }
  std::vector<Tensor<T>> parameter_tensors() const;
  Index parameter_count() const;
  const Tensor<T>* find(const std::string& name) const;

  void zero_grad();
  void set_requires_grad(bool value);

  // Fresh head for a new task; the backbone is untouched.
  void reset_head(HeadKind kind, Index embedding_dim, std::uint64_t seed);

  std::vector<std::vector<T>> snapshot() const;
  void restore(const std::vector<std::vector<T>>& values);

 private:
  struct Stage {
    Tensor<T> merge_gamma, merge_beta;  // undefined for the first stage
    Linear<T> merge;
    Tensor<T> pos_spatial, pos_temporal;
    std::vector<BlockParams<T>> blocks;
  };
  struct StageGeometry {
    WindowGrid regular, shifted;
    AttentionMask<T> regular_mask, shifted_mask;
    std::vector<Index> relative_index;
  };

  void build(std::uint64_t seed);
  void build_head(std::mt19937_64& rng);
  void register_all();

  ModelConfig cfg_;
  Linear<T> embed_;
  std::array<Stage, kNumStages> stages_;
  Tensor<T> norm_gamma_, norm_beta_;
  HeadParams<T> head_;
  std::array<StageGeometry, kNumStages> geometry_;
  std::vector<NamedTensor<T>> params_;
};

// Truncated normal (|x| <= 2 std) used for weight initialization.
std::vector<double> truncated_normal(std::size_t n, double stddev, std::mt19937_64& rng);

extern template class SwinModel<float>;
extern template class SwinModel<double>;

}  // namespace swin4d
