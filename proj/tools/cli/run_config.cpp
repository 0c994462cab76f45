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

#include "run_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "swin4d/error.hpp"

namespace swin4d::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SWIN4D_NUM_FIELD(name, member, conv)                                         \
  {                                                                                 \
    name, Field {                                                                   \
      [](RunConfig& c, const std::string& v) { c.member = conv(name, v); },         \
          [](const RunConfig& c) { return fmt(static_cast<double>(c.member)); }     \
    }                                                                               \
  }

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"task", {[](RunConfig& c, const std::string& v) { c.task = parse_task(v); },
                [](const RunConfig& c) { return to_string(c.task); }}},
      {"seed", {[](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int("seed", v)); },
                [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"subseq_len", {[](RunConfig& c, const std::string& v) { c.model.input_dims[0] = to_int("subseq_len", v); },
                      [](const RunConfig& c) { return std::to_string(c.model.input_dims[0]); }}},
      SWIN4D_NUM_FIELD("epochs", train.epochs, to_int),
      SWIN4D_NUM_FIELD("batch_size", train.batch_size, to_int),
      SWIN4D_NUM_FIELD("lr", train.lr, to_double),
      SWIN4D_NUM_FIELD("warmup_fraction", train.warmup_fraction, to_double),
      SWIN4D_NUM_FIELD("weight_decay", train.adamw.weight_decay, to_double),
      SWIN4D_NUM_FIELD("beta1", train.adamw.beta1, to_double),
      SWIN4D_NUM_FIELD("beta2", train.adamw.beta2, to_double),
      SWIN4D_NUM_FIELD("adam_eps", train.adamw.eps, to_double),
      {"augment", {[](RunConfig& c, const std::string& v) { c.train.augment = to_bool("augment", v); },
                   [](const RunConfig& c) { return std::string(c.train.augment ? "true" : "false"); }}},
      SWIN4D_NUM_FIELD("aug_noise_prob", train.augmentation.noise_prob, to_double),
      SWIN4D_NUM_FIELD("aug_noise_sigma", train.augmentation.noise_sigma, to_double),
      SWIN4D_NUM_FIELD("aug_smooth_prob", train.augmentation.smooth_prob, to_double),
      SWIN4D_NUM_FIELD("aug_smooth_sigma", train.augmentation.smooth_sigma, to_double),
      SWIN4D_NUM_FIELD("temperature", train.contrastive.temperature, to_double),
      {"symmetric_ic",
       {[](RunConfig& c, const std::string& v) { c.train.contrastive.symmetric = to_bool("symmetric_ic", v); },
        [](const RunConfig& c) { return std::string(c.train.contrastive.symmetric ? "true" : "false"); }}},
      SWIN4D_NUM_FIELD("finetune_lr_scale", finetune_lr_scale, to_double),
      SWIN4D_NUM_FIELD("n_subjects", synth.n_subjects, to_int),
      {"frames", {[](RunConfig& c, const std::string& v) { c.synth.dims[0] = to_int("frames", v); },
                  [](const RunConfig& c) { return std::to_string(c.synth.dims[0]); }}},
      SWIN4D_NUM_FIELD("amplitude", synth.amplitude, to_double),
      SWIN4D_NUM_FIELD("noise_sigma", synth.noise_sigma, to_double),
      SWIN4D_NUM_FIELD("noise_smoothing", synth.noise_smoothing, to_double),
      SWIN4D_NUM_FIELD("temporal_correlation", synth.temporal_correlation, to_double),
      SWIN4D_NUM_FIELD("period", synth.period, to_int),
      SWIN4D_NUM_FIELD("split_train", split.train, to_double),
      SWIN4D_NUM_FIELD("split_val", split.val, to_double),
      SWIN4D_NUM_FIELD("split_test", split.test, to_double),
      {"split", {[](RunConfig& c, const std::string& v) {
                   if (v != "train" && v != "val" && v != "test")
                     throw ConfigError("split: expected train, val or test, got '" + v + "'");
                   c.eval_split = v;
                 },
                 [](const RunConfig& c) { return c.eval_split; }}},
      {"data", {[](RunConfig& c, const std::string& v) { c.data_dir = v; },
                [](const RunConfig& c) { return c.data_dir.string(); }}},
      {"out", {[](RunConfig& c, const std::string& v) { c.out_dir = v; },
               [](const RunConfig& c) { return c.out_dir.string(); }}},
      {"checkpoint", {[](RunConfig& c, const std::string& v) { c.checkpoint = v; },
                      [](const RunConfig& c) { return c.checkpoint.string(); }}},
      SWIN4D_NUM_FIELD("ig_steps", attribution.steps, to_int),
      SWIN4D_NUM_FIELD("ig_noise_sigma", attribution.noise_sigma, to_double),
      SWIN4D_NUM_FIELD("ig_samples", attribution.samples, to_int),
      SWIN4D_NUM_FIELD("ig_smooth_sigma", attribution.smooth_sigma, to_double),
      SWIN4D_NUM_FIELD("bench_samples", bench.samples, to_int),
      SWIN4D_NUM_FIELD("bench_warmup", bench.warmup, to_int),
      SWIN4D_NUM_FIELD("bench_repetitions", bench.repetitions, to_int),
  };
  return table;
}

#undef SWIN4D_NUM_FIELD

ModelConfig preset_config(const std::string& name) {
  if (name == "desk") return ModelConfig::desk();
  if (name == "tiny") return ModelConfig::tiny();
  if (name == "full") return ModelConfig::full();
  throw ConfigError("preset: expected desk, tiny or full, got '" + name + "'");
}

void validate(const RunConfig& c) {
  c.model.validate();
  if (c.train.epochs < 0) throw ConfigError("epochs: must be non-negative");
  if (c.train.batch_size < 1) throw ConfigError("batch_size: must be positive");
  if (!(c.train.lr >= 0)) throw ConfigError("lr: must be non-negative");
  if (c.train.warmup_fraction < 0 || c.train.warmup_fraction > 1) throw ConfigError("warmup_fraction: must be in [0, 1]");
  if (c.train.contrastive.temperature <= 0) throw ConfigError("temperature: must be positive");
  if (c.finetune_lr_scale < 0) throw ConfigError("finetune_lr_scale: must be non-negative");
  if (c.synth.n_subjects < 1) throw ConfigError("n_subjects: must be positive");
  if (c.synth.dims[0] < c.model.input_dims[0])
    throw ConfigError("frames: " + std::to_string(c.synth.dims[0]) + " is shorter than subseq_len " +
                      std::to_string(c.model.input_dims[0]));
  if (c.synth.period < 2) throw ConfigError("period: must be at least 2");
  if (std::abs(c.split.train + c.split.val + c.split.test - 1.0) > 1e-9 || c.split.train < 0 || c.split.val < 0 ||
      c.split.test < 0)
    throw ConfigError("split_train/split_val/split_test: must be non-negative and sum to 1");
  if (c.attribution.steps < 1) throw ConfigError("ig_steps: must be at least 1");
  if (c.attribution.samples < 1) throw ConfigError("ig_samples: must be at least 1");
  if (c.bench.samples < 1) throw ConfigError("bench_samples: must be at least 1");
}

void apply_settings(RunConfig& c, const KeyValues& kv) {
  KeyValues model_keys;
  for (const auto& [k, v] : kv) {
    if (k == "preset") continue;
    if (auto it = fields().find(k); it != fields().end()) {
      it->second.set(c, v);
    } else {
      model_keys.emplace_back(k, v);
    }
  }
  const auto unknown = apply_key_values(c.model, model_keys);
  if (!unknown.empty()) throw ConfigError("unknown key '" + unknown.front() + "'");
}

}  // namespace

RunConfig::RunConfig() { train.lr = 1e-3; }

KeyValues read_key_value_text(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": missing key");
    kv.emplace_back(key, value);
  }
  return kv;
}

RunConfig parse_config_text(const std::string& text, const KeyValues& overrides) {
  KeyValues kv = read_key_value_text(text);
  kv.insert(kv.end(), overrides.begin(), overrides.end());
  RunConfig c;
  for (const auto& [k, v] : kv)
    if (k == "preset") {
      c.preset = v;
      c.model = preset_config(v);
    }
  apply_settings(c, kv);
  // Synthetic volumes always match the model's spatial input.
  c.synth.dims[1] = c.model.input_dims[1];
  c.synth.dims[2] = c.model.input_dims[2];
  c.synth.dims[3] = c.model.input_dims[3];
  c.model.head = head_for(c.task);
  c.synth.seed = c.seed;
  c.split.seed = c.seed;
  c.train.seed = c.seed;
  validate(c);
  return c;
}

RunConfig parse_config(const std::filesystem::path& path, const KeyValues& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config_text(text, overrides);
}

std::string describe(const RunConfig& c) {
  std::string out = "preset = " + c.preset + "\n";
  for (const auto& [k, v] : to_key_values(c.model))
    if (k != "head") out += k + " = " + v + "\n";
  for (const auto& [k, f] : fields()) out += k + " = " + f.get(c) + "\n";
  return out;
}

}  // namespace swin4d::cli
