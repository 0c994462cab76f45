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

#include "swin4d/optim.hpp"

#include <cmath>
#include <numbers>

#include "swin4d/error.hpp"

namespace swin4d {

template <typename T>
void adamw_step(std::span<Tensor<T>> params, AdamWState<T>& state, const AdamWHyper& hyper, double lr) {
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(static_cast<std::size_t>(p.numel()), T(0));
      state.v.emplace_back(static_cast<std::size_t>(p.numel()), T(0));
    }
  }
  if (state.m.size() != params.size()) throw ValidationError("adamw_step: optimizer state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].mutable_data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != w.size()) throw ValidationError("adamw_step: state size mismatch for parameter " + std::to_string(i));
    const bool has_grad = params[i].has_grad();
    const auto g = has_grad ? params[i].grad() : std::span<const T>{};
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = has_grad ? static_cast<double>(g[j]) : 0.0;
      double wj = static_cast<double>(w[j]);
      wj -= lr * hyper.weight_decay * wj;
      const double mj = hyper.beta1 * static_cast<double>(m[j]) + (1.0 - hyper.beta1) * gj;
      const double vj = hyper.beta2 * static_cast<double>(v[j]) + (1.0 - hyper.beta2) * gj * gj;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      wj -= lr * (mj / c1) / (std::sqrt(vj / c2) + hyper.eps);
      w[j] = static_cast<T>(wj);
    }
  }
}

double lr_schedule(std::int64_t step, std::int64_t total_steps, double base_lr, double warmup_fraction) {
  if (total_steps <= 0 || step < 0 || step > total_steps)
    throw ValidationError("lr_schedule: step " + std::to_string(step) + " outside [0, " + std::to_string(total_steps) +
                          "]");
  const auto warmup = static_cast<std::int64_t>(std::llround(warmup_fraction * static_cast<double>(total_steps)));
  if (step < warmup) return base_lr * static_cast<double>(step) / static_cast<double>(warmup);
  if (total_steps == warmup) return base_lr;
  const double progress = static_cast<double>(step - warmup) / static_cast<double>(total_steps - warmup);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

template void adamw_step(std::span<Tensor<float>>, AdamWState<float>&, const AdamWHyper&, double);
template void adamw_step(std::span<Tensor<double>>, AdamWState<double>&, const AdamWHyper&, double);

}  // namespace swin4d
