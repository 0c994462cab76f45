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

#include <ostream>

#include "run_config.hpp"

namespace swin4d::cli {

struct CommandFlags {
  bool json = false;
  bool windows = false;
};

// Each returns the process exit code; validation problems throw
// ValidationError, runtime problems RuntimeFailure.
int run_synth(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out);
int run_train(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out);
int run_eval(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out);
int run_finetune(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out);
int run_count(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out);
int run_bench(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out);
int run_attribute(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out);

}  // namespace swin4d::cli
