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
#include <span>
#include <vector>

#include "swin4d/tensor.hpp"

namespace swin4d {

struct AdamWHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

template <typename T>
struct AdamWState {
  std::int64_t step = 0;
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
};

// One decoupled-weight-decay Adam update at learning rate `lr`. Parameters
// without a gradient are treated as having a zero gradient. The state is
// sized on first use.
template <typename T>
void adamw_step(std::span<Tensor<T>> params, AdamWState<T>& state, const AdamWHyper& hyper, double lr);

// Linear warm-up from 0 to base_lr over round(warmup_fraction * total_steps)
// steps, then cosine decay to 0 at total_steps.
double lr_schedule(std::int64_t step, std::int64_t total_steps, double base_lr, double warmup_fraction);

}  // namespace swin4d
