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
#include <filesystem>
#include <string>

#include "swin4d/config.hpp"
#include "swin4d/data.hpp"
#include "swin4d/train.hpp"

namespace swin4d::cli {

struct AttributionOptions {
  int steps = 32;
  double noise_sigma = 0.1;
  int samples = 4;
  double smooth_sigma = 1.0;
};

struct BenchOptions {
  std::int64_t samples = 10;
  int warmup = 2;
  int repetitions = 5;
};

/// Every setting a subcommand can read. Model keys are those of ModelConfig;
/// `preset` (desk, tiny, full) is applied before any other key.
struct RunConfig {
  std::string preset = "desk";
  ModelConfig model = ModelConfig::desk();
  Task task = Task::kSex;
  std::uint64_t seed = 0;
  TrainOptions train;
  double finetune_lr_scale = 0.1;
  SynthOptions synth;
  SplitSpec split;
  std::string eval_split = "test";
  std::filesystem::path data_dir;
  std::filesystem::path out_dir = ".";
  std::filesystem::path checkpoint;
  AttributionOptions attribution;
  BenchOptions bench;

  RunConfig();
};

// Reads `key = value` lines (blank lines and '#' comments ignored), then
// applies `overrides` on top. Unknown keys and bad values throw ConfigError.
RunConfig parse_config(const std::filesystem::path& path, const KeyValues& overrides = {});
RunConfig parse_config_text(const std::string& text, const KeyValues& overrides = {});

KeyValues read_key_value_text(const std::string& text);

// Keys with their current values, one per line, for --help and config dumps.
std::string describe(const RunConfig& cfg);

}  // namespace swin4d::cli
