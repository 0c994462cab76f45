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
#include <optional>
#include <string>
#include <vector>

#include "swin4d/config.hpp"
#include "swin4d/tensor.hpp"

namespace swin4d {

// On-disk layout:
//
//   swin4d-container
//   format_version 1
//   kind <kind>
//   config <key> <value>        (zero or more)
//   meta <key> <value>          (zero or more; value runs to end of line)
//   tensor <name> <d0,d1,...|-> <offset>
//   end_header
//   <little-endian IEEE-754 float32 payload>
//
// Offsets count float32 elements from the start of the payload.
inline constexpr int kContainerFormatVersion = 1;

struct ContainerTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Container {
  std::string kind;
  KeyValues config;
  KeyValues meta;
  std::vector<ContainerTensor> tensors;

  const ContainerTensor* find(const std::string& name) const;
  std::optional<std::string> meta_value(const std::string& key) const;
  void set_meta(const std::string& key, const std::string& value);
};

void write_container(const std::filesystem::path& path, const Container& c);
Container read_container(const std::filesystem::path& path);

}  // namespace swin4d
