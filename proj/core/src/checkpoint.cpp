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

#include "swin4d/checkpoint.hpp"

#include "swin4d/error.hpp"

namespace swin4d {

template <typename T>
Container make_checkpoint(const SwinModel<T>& model, const AdamWState<T>* optimizer) {
  Container c;
  c.kind = "checkpoint";
  c.config = to_key_values(model.config());
  for (const auto& p : model.parameters())
    c.tensors.push_back({p.name, p.tensor.shape(), std::vector<float>(p.tensor.data().begin(), p.tensor.data().end())});
  if (optimizer && !optimizer->m.empty()) {
    const auto params = model.parameters();
    if (optimizer->m.size() != params.size()) throw ValidationError("make_checkpoint: optimizer state mismatch");
    c.set_meta("optim.step", std::to_string(optimizer->step));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& shape = params[i].tensor.shape();
      c.tensors.push_back({"optim.m." + params[i].name, shape,
                           std::vector<float>(optimizer->m[i].begin(), optimizer->m[i].end())});
      c.tensors.push_back({"optim.v." + params[i].name, shape,
                           std::vector<float>(optimizer->v[i].begin(), optimizer->v[i].end())});
    }
  }
  return c;
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const SwinModel<T>& model, const AdamWState<T>* optimizer,
                     const KeyValues& meta) {
  Container c = make_checkpoint(model, optimizer);
  for (const auto& [k, v] : meta) c.set_meta(k, v);
  write_container(path, c);
}

ModelConfig config_from_container(const Container& c) {
  if (c.kind != "checkpoint") throw ValidationError("expected a checkpoint container, got kind '" + c.kind + "'");
  ModelConfig cfg;
  const auto unknown = apply_key_values(cfg, c.config);
  if (!unknown.empty()) throw ConfigError("checkpoint: unknown config key '" + unknown.front() + "'");
  cfg.validate();
  return cfg;
}

template <typename T>
void load_parameters(SwinModel<T>& model, const Container& c, bool include_head) {
  auto tensors = model.parameter_tensors();
  const auto params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& name = params[i].name;
    if (!include_head && name.rfind("head.", 0) == 0) continue;
    const ContainerTensor* t = c.find(name);
    if (!t) throw ValidationError("checkpoint is missing parameter " + name);
    if (t->shape != tensors[i].shape())
      throw ShapeError("checkpoint parameter " + name + " has shape " + shape_to_string(t->shape) + ", model expects " +
                       shape_to_string(tensors[i].shape()));
    auto dst = tensors[i].mutable_data();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = static_cast<T>(t->values[j]);
  }
}

template <typename T>
SwinModel<T> load_model(const Container& c) {
  SwinModel<T> model(config_from_container(c));
  load_parameters(model, c);
  return model;
}

template <typename T>
AdamWState<T> load_optimizer(const Container& c, const SwinModel<T>& model) {
  AdamWState<T> state;
  const auto step = c.meta_value("optim.step");
  if (!step) return state;
  state.step = std::stoll(*step);
  for (const auto& p : model.parameters()) {
    const ContainerTensor* m = c.find("optim.m." + p.name);
    const ContainerTensor* v = c.find("optim.v." + p.name);
    if (!m || !v || m->shape != p.tensor.shape() || v->shape != p.tensor.shape())
      throw ValidationError("checkpoint optimizer state does not match parameter " + p.name);
    state.m.emplace_back(m->values.begin(), m->values.end());
    state.v.emplace_back(v->values.begin(), v->values.end());
  }
  return state;
}

#define SWIN4D_INSTANTIATE_CHECKPOINT(T)                                                                      \
  template Container make_checkpoint(const SwinModel<T>&, const AdamWState<T>*);                              \
  template void save_checkpoint(const std::filesystem::path&, const SwinModel<T>&, const AdamWState<T>*,      \
                                const KeyValues&);                                                            \
  template void load_parameters(SwinModel<T>&, const Container&, bool);                                       \
  template SwinModel<T> load_model(const Container&);                                                         \
  template AdamWState<T> load_optimizer(const Container&, const SwinModel<T>&);

SWIN4D_INSTANTIATE_CHECKPOINT(float)
SWIN4D_INSTANTIATE_CHECKPOINT(double)

}  // namespace swin4d
