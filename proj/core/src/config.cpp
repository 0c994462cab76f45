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

#include "swin4d/config.hpp"

#include <charconv>
#include <sstream>

#include "swin4d/error.hpp"

namespace swin4d {

std::string dims_to_string(const Dims4& dims) {
  std::ostringstream os;
  os << dims[0] << 'x' << dims[1] << 'x' << dims[2] << 'x' << dims[3];
  return os.str();
}

std::string to_string(PosEmbedMode mode) { return mode == PosEmbedMode::kAbsolute ? "absolute" : "relative"; }

std::string to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::kBinaryLogit: return "binary_logit";
    case HeadKind::kScalarRegression: return "scalar_regression";
    case HeadKind::kEmbedding: return "embedding";
  }
  return "?";
}

std::string to_string(Activation act) { return act == Activation::kGelu ? "gelu" : "relu"; }

PosEmbedMode parse_pos_embed_mode(const std::string& text) {
  if (text == "absolute") return PosEmbedMode::kAbsolute;
  if (text == "relative") return PosEmbedMode::kRelative;
  throw ConfigError("pos_embed: expected absolute or relative, got '" + text + "'");
}

HeadKind parse_head_kind(const std::string& text) {
  if (text == "binary_logit") return HeadKind::kBinaryLogit;
  if (text == "scalar_regression") return HeadKind::kScalarRegression;
  if (text == "embedding") return HeadKind::kEmbedding;
  throw ConfigError("head: expected binary_logit, scalar_regression or embedding, got '" + text + "'");
}

Activation parse_activation(const std::string& text) {
  if (text == "gelu") return Activation::kGelu;
  if (text == "relu") return Activation::kRelu;
  throw ConfigError("activation: expected gelu or relu, got '" + text + "'");
}

ModelConfig ModelConfig::full() {
  ModelConfig cfg;
  cfg.input_dims = {20, 96, 96, 96};
  cfg.patch_size = 6;
  cfg.channels = 36;
  cfg.depths = {2, 2, 6, 2};
  cfg.window = {4, 4, 4, 4};
  cfg.heads = {3, 6, 12, 24};
  return cfg;
}

ModelConfig ModelConfig::desk() { return ModelConfig{}; }

ModelConfig ModelConfig::tiny() {
  ModelConfig cfg;
  cfg.input_dims = {8, 16, 16, 16};
  cfg.patch_size = 2;
  cfg.channels = 4;
  cfg.depths = {2, 2, 2, 2};
  cfg.window = {2, 2, 2, 2};
  cfg.heads = {2, 2, 2, 2};
  cfg.embedding_dim = 8;
  return cfg;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
  for (Index e : input_dims)
    if (e <= 0) fail("input_dims", "extents must be positive, got " + dims_to_string(input_dims));
  if (patch_size <= 0) fail("patch_size", "must be positive");
  if (channels <= 0) fail("channels", "must be positive");
  for (int i = 1; i < 4; ++i)
    if (input_dims[i] % patch_size != 0)
      fail("input_dims", "spatial extent " + std::to_string(input_dims[i]) + " not divisible by patch_size " +
                             std::to_string(patch_size));
  const Index merge_factor = Index{1} << (kNumStages - 1);
  for (int i = 1; i < 4; ++i)
    if ((input_dims[i] / patch_size) % merge_factor != 0)
      fail("input_dims", "spatial token extent " + std::to_string(input_dims[i] / patch_size) +
                             " must be divisible by " + std::to_string(merge_factor) + " for three patch merges");
  for (int d : depths)
    if (d <= 0) fail("depths", "every stage needs at least one block");
  for (Index w : window)
    if (w <= 0) fail("window", "extents must be positive, got " + dims_to_string(window));
  for (int s = 0; s < kNumStages; ++s) {
    if (heads[s] <= 0) fail("heads", "head counts must be positive");
    if (stage_channels(s) % heads[s] != 0)
      fail("heads", "stage " + std::to_string(s + 1) + " width " + std::to_string(stage_channels(s)) +
                        " not divisible by " + std::to_string(heads[s]) + " heads");
  }
  if (mlp_ratio <= 0) fail("mlp_ratio", "must be positive");
  if (head == HeadKind::kEmbedding && embedding_dim <= 0) fail("embedding_dim", "must be positive");
  if (head_hidden < 0) fail("head_hidden", "must be non-negative");
  if (!(layer_norm_eps >= 0)) fail("layer_norm_eps", "must be non-negative");
  if (!(dropout >= 0 && dropout < 1)) fail("dropout", "must lie in [0, 1)");
}

Index ModelConfig::stage_channels(int stage) const { return channels << stage; }

Dims4 ModelConfig::stage_tokens(int stage) const {
  const Index f = Index{1} << stage;
  return {input_dims[0], input_dims[1] / patch_size / f, input_dims[2] / patch_size / f,
          input_dims[3] / patch_size / f};
}

Dims4 ModelConfig::shift() const { return {window[0] / 2, window[1] / 2, window[2] / 2, window[3] / 2}; }

Index ModelConfig::window_volume() const { return window[0] * window[1] * window[2] * window[3]; }

Index ModelConfig::output_dim() const { return head == HeadKind::kEmbedding ? embedding_dim : 1; }

Index ModelConfig::head_hidden_width() const { return head_hidden > 0 ? head_hidden : stage_channels(kNumStages - 1); }

namespace {

template <typename Int, std::size_t N>
std::string join(const std::array<Int, N>& values) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

// Accepts "a,b,c,d" or a single value broadcast to every slot.
template <typename Int, std::size_t N>
std::array<Int, N> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    parts.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  std::array<Int, N> out{};
  if (parts.size() == 1) {
    out.fill(parse_int<Int>(key, parts[0]));
  } else if (parts.size() == N) {
    for (std::size_t i = 0; i < N; ++i) out[i] = parse_int<Int>(key, parts[i]);
  } else {
    throw ConfigError(key + ": expected " + std::to_string(N) + " comma-separated values, got '" + text + "'");
  }
  return out;
}

}  // namespace

KeyValues to_key_values(const ModelConfig& cfg) {
  std::ostringstream eps, drop;
  eps.precision(17);
  drop.precision(17);
  eps << cfg.layer_norm_eps;
  drop << cfg.dropout;
  return {
      {"input_dims", join(cfg.input_dims)},
      {"patch_size", std::to_string(cfg.patch_size)},
      {"channels", std::to_string(cfg.channels)},
      {"depths", join(cfg.depths)},
      {"window", join(cfg.window)},
      {"heads", join(cfg.heads)},
      {"mlp_ratio", std::to_string(cfg.mlp_ratio)},
      {"pos_embed", to_string(cfg.pos_embed)},
      {"head", to_string(cfg.head)},
      {"embedding_dim", std::to_string(cfg.embedding_dim)},
      {"head_hidden", std::to_string(cfg.head_hidden)},
      {"activation", to_string(cfg.activation)},
      {"layer_norm_eps", eps.str()},
      {"dropout", drop.str()},
  };
}

std::vector<std::string> apply_key_values(ModelConfig& cfg, const KeyValues& kv) {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : kv) {
    if (key == "input_dims") cfg.input_dims = parse_list<Index, 4>(key, value);
    else if (key == "patch_size") cfg.patch_size = parse_int<Index>(key, value);
    else if (key == "channels") cfg.channels = parse_int<Index>(key, value);
    else if (key == "depths") cfg.depths = parse_list<int, 4>(key, value);
    else if (key == "window") cfg.window = parse_list<Index, 4>(key, value);
    else if (key == "heads") cfg.heads = parse_list<int, 4>(key, value);
    else if (key == "mlp_ratio") cfg.mlp_ratio = parse_int<int>(key, value);
    else if (key == "pos_embed") cfg.pos_embed = parse_pos_embed_mode(value);
    else if (key == "head") cfg.head = parse_head_kind(value);
    else if (key == "embedding_dim") cfg.embedding_dim = parse_int<Index>(key, value);
    else if (key == "head_hidden") cfg.head_hidden = parse_int<Index>(key, value);
    else if (key == "activation") cfg.activation = parse_activation(value);
    else if (key == "layer_norm_eps") cfg.layer_norm_eps = parse_double(key, value);
    else if (key == "dropout") cfg.dropout = parse_double(key, value);
    else unknown.push_back(key);
  }
  return unknown;
}

}  // namespace swin4d
