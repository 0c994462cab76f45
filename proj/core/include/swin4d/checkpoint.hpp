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

#include <filesystem>

#include "swin4d/container.hpp"
#include "swin4d/model.hpp"
#include "swin4d/optim.hpp"

namespace swin4d {

// Model parameters in manifest order, the config in the header, and
// optionally the optimizer moments as "optim.m.<name>" / "optim.v.<name>".
template <typename T>
Container make_checkpoint(const SwinModel<T>& model, const AdamWState<T>* optimizer = nullptr);

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const SwinModel<T>& model,
                     const AdamWState<T>* optimizer = nullptr, const KeyValues& meta = {});

ModelConfig config_from_container(const Container& c);

// Copies parameters by name; every model parameter must be present with the
// same shape. With include_head false the head.* entries are skipped.
template <typename T>
void load_parameters(SwinModel<T>& model, const Container& c, bool include_head = true);

template <typename T>
SwinModel<T> load_model(const Container& c);

// Empty state when the container carries no optimizer tensors.
template <typename T>
AdamWState<T> load_optimizer(const Container& c, const SwinModel<T>& model);

}  // namespace swin4d
