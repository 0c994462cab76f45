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

#include "swin4d/model.hpp"

#include "swin4d/error.hpp"
#include "swin4d/ops.hpp"

namespace swin4d {

std::vector<double> truncated_normal(std::size_t n, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) {
    double z = normal(rng);
    while (std::abs(z) > 2.0) z = normal(rng);
    v = z * stddev;
  }
  return out;
}

namespace {

template <typename T>
Tensor<T> init_weight(Shape shape, std::mt19937_64& rng) {
  const auto values = truncated_normal(static_cast<std::size_t>(shape_numel(shape)), 0.02, rng);
  return Tensor<T>(std::move(shape), std::vector<T>(values.begin(), values.end()));
}

template <typename T>
Linear<T> init_linear(Index in, Index out, std::mt19937_64& rng) {
  return {init_weight<T>({in, out}, rng), Tensor<T>::zeros({out})};
}

}  // namespace

template <typename T>
SwinModel<T>::SwinModel(ModelConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  build(seed);
}

template <typename T>
void SwinModel<T>::build(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index p = cfg_.patch_size;
  embed_ = init_linear<T>(p * p * p, cfg_.channels, rng);
  for (int s = 0; s < kNumStages; ++s) {
    Stage& stage = stages_[s];
    const Index c = cfg_.stage_channels(s);
    const Dims4 tokens = cfg_.stage_tokens(s);
    const bool global = s == kNumStages - 1;
    if (s > 0) {
      stage.merge_gamma = Tensor<T>::ones({8 * cfg_.stage_channels(s - 1)});
      stage.merge_beta = Tensor<T>::zeros({8 * cfg_.stage_channels(s - 1)});
      stage.merge = init_linear<T>(8 * cfg_.stage_channels(s - 1), c, rng);
    }
    if (cfg_.pos_embed == PosEmbedMode::kAbsolute) {
      stage.pos_spatial = Tensor<T>::zeros({1, tokens[1], tokens[2], tokens[3], c});
      stage.pos_temporal = Tensor<T>::zeros({tokens[0], 1, 1, 1, c});
    }
    const Dims4 attn_window = global ? tokens : cfg_.window;
    const Index hidden = c * cfg_.mlp_ratio;
    stage.blocks.clear();
    for (int b = 0; b < cfg_.depths[s]; ++b) {
      BlockParams<T> blk;
      blk.norm1_gamma = Tensor<T>::ones({c});
      blk.norm1_beta = Tensor<T>::zeros({c});
      blk.attn.heads = cfg_.heads[s];
      blk.attn.qkv = init_linear<T>(c, 3 * c, rng);
      blk.attn.proj = init_linear<T>(c, c, rng);
      if (cfg_.pos_embed == PosEmbedMode::kRelative)
        blk.attn.relative_table = Tensor<T>::zeros({cfg_.heads[s], relative_table_size(attn_window)});
      blk.norm2_gamma = Tensor<T>::ones({c});
      blk.norm2_beta = Tensor<T>::zeros({c});
      blk.fc1 = init_linear<T>(c, hidden, rng);
      blk.fc2 = init_linear<T>(hidden, c, rng);
      stage.blocks.push_back(std::move(blk));
    }
    StageGeometry& geo = geometry_[s];
    if (!global) {
      geo.regular = WindowGrid::make(tokens, cfg_.window, false);
      geo.shifted = WindowGrid::make(tokens, cfg_.window, true);
      geo.regular_mask = build_shift_mask<T>(geo.regular);
      geo.shifted_mask = build_shift_mask<T>(geo.shifted);
    }
    if (cfg_.pos_embed == PosEmbedMode::kRelative) geo.relative_index = relative_position_index(attn_window);
  }
  norm_gamma_ = Tensor<T>::ones({cfg_.stage_channels(kNumStages - 1)});
  norm_beta_ = Tensor<T>::zeros({cfg_.stage_channels(kNumStages - 1)});
  build_head(rng);
  register_all();
}

template <typename T>
void SwinModel<T>::build_head(std::mt19937_64& rng) {
  const Index c = cfg_.stage_channels(kNumStages - 1);
  const Index hidden = cfg_.head_hidden_width();
  head_.fc1 = init_linear<T>(c, hidden, rng);
  head_.fc2 = init_linear<T>(hidden, cfg_.output_dim(), rng);
}

template <typename T>
void SwinModel<T>::register_all() {
  params_.clear();
  auto add = [this](std::string name, Tensor<T>& t) {
    t.set_requires_grad(true);
    params_.push_back({std::move(name), t});
  };
  auto add_linear = [&](const std::string& prefix, Linear<T>& l) {
    add(prefix + ".weight", l.weight);
    add(prefix + ".bias", l.bias);
  };
  add_linear("patch_embed", embed_);
  for (int s = 0; s < kNumStages; ++s) {
    Stage& stage = stages_[s];
    const std::string sp = "stages." + std::to_string(s);
    if (s > 0) {
      add(sp + ".merge.norm.gamma", stage.merge_gamma);
      add(sp + ".merge.norm.beta", stage.merge_beta);
      add_linear(sp + ".merge", stage.merge);
    }
    if (stage.pos_spatial.defined()) {
      add(sp + ".pos_embed.spatial", stage.pos_spatial);
      add(sp + ".pos_embed.temporal", stage.pos_temporal);
    }
    for (std::size_t b = 0; b < stage.blocks.size(); ++b) {
      BlockParams<T>& blk = stage.blocks[b];
      const std::string bp = sp + ".blocks." + std::to_string(b);
      add(bp + ".norm1.gamma", blk.norm1_gamma);
      add(bp + ".norm1.beta", blk.norm1_beta);
      add_linear(bp + ".attn.qkv", blk.attn.qkv);
      add_linear(bp + ".attn.proj", blk.attn.proj);
      if (blk.attn.relative_table.defined()) add(bp + ".attn.relative_table", blk.attn.relative_table);
      add(bp + ".norm2.gamma", blk.norm2_gamma);
      add(bp + ".norm2.beta", blk.norm2_beta);
      add_linear(bp + ".mlp.fc1", blk.fc1);
      add_linear(bp + ".mlp.fc2", blk.fc2);
    }
  }
  add("norm.gamma", norm_gamma_);
  add("norm.beta", norm_beta_);
  add_linear("head.fc1", head_.fc1);
  add_linear("head.fc2", head_.fc2);
}

template <typename T>
SwinModel<T> SwinModel<T>::clone() const {
  return cast<T>();
}

template <typename T>
template <typename U>
SwinModel<U> SwinModel<T>::cast() const {
  SwinModel<U> out(cfg_, 0);
  auto dst = out.parameter_tensors();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto src = params_[i].tensor.data();
    auto values = dst[i].mutable_data();
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = static_cast<U>(src[j]);
  }
  return out;
}

template <typename T>
Tensor<T> SwinModel<T>::features(const Tensor<T>& x, std::mt19937_64* rng) const {
  const Dims4& in = cfg_.input_dims;
  if (x.shape() != Shape{in[0], in[1], in[2], in[3], 1})
    throw ShapeError("forward: input " + shape_to_string(x.shape()) + " does not match configured " +
                     dims_to_string(in) + "x1");
  BlockOptions opt;
  opt.activation = cfg_.activation;
  opt.layer_norm_eps = cfg_.layer_norm_eps;
  opt.dropout = cfg_.dropout;
  opt.rng = rng;
  Tensor<T> z = patch_embed(x, embed_, cfg_.patch_size);
  for (int s = 0; s < kNumStages; ++s) {
    const Stage& stage = stages_[s];
    const StageGeometry& geo = geometry_[s];
    if (s > 0) z = patch_merge(z, stage.merge_gamma, stage.merge_beta, stage.merge, T(cfg_.layer_norm_eps));
    if (stage.pos_spatial.defined()) z = add_positional_embedding(z, stage.pos_spatial, stage.pos_temporal);
    const std::vector<Index>* rel = geo.relative_index.empty() ? nullptr : &geo.relative_index;
    for (std::size_t b = 0; b < stage.blocks.size(); ++b) {
      if (s == kNumStages - 1) {
        z = global_attention_block(z, stage.blocks[b], rel, opt);
      } else if (b % 2 == 0) {
        z = swin_block(z, stage.blocks[b], geo.regular, geo.regular_mask, rel, opt);
      } else {
        z = swin_block(z, stage.blocks[b], geo.shifted, geo.shifted_mask, rel, opt);
      }
    }
  }
  return layer_norm(z, norm_gamma_, norm_beta_, T(cfg_.layer_norm_eps));
}

template <typename T>
Tensor<T> SwinModel<T>::forward(const Tensor<T>& x, std::mt19937_64* rng) const {
  return pooled_head(features(x, rng), head_, cfg_.activation);
}

template <typename T>
std::vector<Tensor<T>> SwinModel<T>::parameter_tensors() const {
  std::vector<Tensor<T>> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.tensor);
  return out;
}

template <typename T>
Index SwinModel<T>::parameter_count() const {
  Index n = 0;
  for (const auto& p : params_) n += p.tensor.numel();
  return n;
}

template <typename T>
const Tensor<T>* SwinModel<T>::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return &p.tensor;
  return nullptr;
}

template <typename T>
void SwinModel<T>::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

template <typename T>
void SwinModel<T>::set_requires_grad(bool value) {
  for (auto& p : params_) p.tensor.set_requires_grad(value);
}

template <typename T>
void SwinModel<T>::reset_head(HeadKind kind, Index embedding_dim, std::uint64_t seed) {
  cfg_.head = kind;
  cfg_.embedding_dim = embedding_dim;
  cfg_.validate();
  std::mt19937_64 rng(seed);
  build_head(rng);
  register_all();
}

template <typename T>
std::vector<std::vector<T>> SwinModel<T>::snapshot() const {
  std::vector<std::vector<T>> out;
  for (const auto& p : params_) out.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  return out;
}

template <typename T>
void SwinModel<T>::restore(const std::vector<std::vector<T>>& values) {
  if (values.size() != params_.size()) throw ValidationError("restore: parameter count mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto dst = params_[i].tensor.mutable_data();
    if (dst.size() != values[i].size()) throw ValidationError("restore: size mismatch for " + params_[i].name);
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

template class SwinModel<float>;
template class SwinModel<double>;
template SwinModel<double> SwinModel<float>::cast<double>() const;
template SwinModel<float> SwinModel<double>::cast<float>() const;

}  // namespace swin4d
