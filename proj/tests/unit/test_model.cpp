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

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "swin4d/analysis.hpp"
#include "swin4d/autodiff.hpp"
#include "swin4d/checkpoint.hpp"
#include "swin4d/container.hpp"
#include "swin4d/error.hpp"
#include "swin4d/model.hpp"
#include "swin4d/ops.hpp"
#include "test_support.hpp"

namespace swin4d {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;
using TD = Tensor<double>;

std::vector<ModelConfig> config_matrix() {
  std::vector<ModelConfig> out{ModelConfig::desk(), ModelConfig::tiny()};
  auto rel = ModelConfig::tiny();
  rel.pos_embed = PosEmbedMode::kRelative;
  out.push_back(rel);
  auto desk_rel = ModelConfig::desk();
  desk_rel.pos_embed = PosEmbedMode::kRelative;
  out.push_back(desk_rel);
  auto odd = ModelConfig::tiny();
  odd.depths = {1, 3, 2, 1};
  odd.mlp_ratio = 2;
  odd.head = HeadKind::kEmbedding;
  odd.embedding_dim = 6;
  odd.head_hidden = 5;
  odd.input_dims = {5, 16, 16, 16};
  odd.window = {2, 2, 2, 2};
  out.push_back(odd);
  auto reg = ModelConfig::tiny();
  reg.head = HeadKind::kScalarRegression;
  reg.activation = Activation::kRelu;
  reg.window = {3, 2, 2, 2};
  out.push_back(reg);
  return out;
}

TEST(Model, StageShapesFollowTheMergeProgression) {
  const auto cfg = ModelConfig::desk();
  for (int s = 0; s < kNumStages; ++s) {
    EXPECT_EQ(cfg.stage_channels(s), cfg.channels << s);
    const Index side = cfg.input_dims[1] / cfg.patch_size >> s;
    EXPECT_EQ(cfg.stage_tokens(s), (Dims4{cfg.input_dims[0], side, side, side}));
  }
  const auto full = ModelConfig::full();
  EXPECT_EQ(full.stage_tokens(0), (Dims4{20, 16, 16, 16}));
  EXPECT_EQ(full.stage_tokens(3), (Dims4{20, 2, 2, 2}));
  EXPECT_EQ(full.stage_channels(3), 288);

  SwinModel<double> model(cfg, 1);
  std::mt19937_64 rng(1);
  const auto x = random_tensor({8, 24, 24, 24, 1}, rng);
  NoGradGuard g;
  const Dims4 last = cfg.stage_tokens(3);
  EXPECT_EQ(model.features(x).shape(), (Shape{last[0], last[1], last[2], last[3], cfg.stage_channels(3)}));
  EXPECT_EQ(model.forward(x).shape(), (Shape{1}));
}

TEST(Model, ForwardIsDeterministic) {
  SwinModel<double> model(ModelConfig::tiny(), 4);
  std::mt19937_64 rng(2);
  const auto x = random_tensor({8, 16, 16, 16, 1}, rng);
  EXPECT_TRUE(testing::bitwise_equal(model.forward(x), model.forward(x)));
  SwinModel<double> twin(ModelConfig::tiny(), 4);
  EXPECT_TRUE(testing::bitwise_equal(twin.forward(x), model.forward(x)));
}

TEST(Model, ManifestMatchesClosedFormCount) {
  for (const auto& cfg : config_matrix()) {
    SwinModel<float> model(cfg, 0);
    const auto report = param_count(cfg);
    ASSERT_EQ(report.entries.size(), model.parameters().size());
    Index manifest = 0;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
      EXPECT_EQ(report.entries[i].first, model.parameters()[i].name);
      EXPECT_EQ(report.entries[i].second, model.parameters()[i].tensor.numel()) << report.entries[i].first;
      manifest += model.parameters()[i].tensor.numel();
    }
    EXPECT_EQ(report.total, manifest);
    EXPECT_EQ(model.parameter_count(), manifest);
  }
}

TEST(Model, OutputWidthFollowsHeadKind) {
  for (const auto& cfg : config_matrix()) {
    SwinModel<double> model(cfg, 0);
    std::mt19937_64 rng(3);
    const auto& d = cfg.input_dims;
    NoGradGuard g;
    const auto y = model.forward(random_tensor({d[0], d[1], d[2], d[3], 1}, rng));
    EXPECT_EQ(y.numel(), cfg.output_dim());
  }
}

TEST(Model, InitializationIsTruncatedNormalWithZeroBiases) {
  SwinModel<double> model(ModelConfig::desk(), 9);
  for (const auto& p : model.parameters()) {
    const bool zero = p.name.find("bias") != std::string::npos || p.name.find("pos_embed") != std::string::npos ||
                      p.name.find("beta") != std::string::npos;
    const bool one = p.name.find("gamma") != std::string::npos;
    for (double v : p.tensor.data()) {
      if (zero) ASSERT_EQ(v, 0.0) << p.name;
      else if (one) ASSERT_EQ(v, 1.0) << p.name;
      else ASSERT_LE(std::abs(v), 0.04 + 1e-12) << p.name;
    }
  }
  std::mt19937_64 rng(1);
  const auto draws = truncated_normal(20000, 0.02, rng);
  double m = 0;
  for (double v : draws) {
    ASSERT_LE(std::abs(v), 0.04);
    m += v / draws.size();
  }
  EXPECT_LT(std::abs(m), 1e-3);
}

TEST(Model, TinyGradientsMatchFiniteDifferences) {
  SwinModel<double> model(ModelConfig::tiny(), 11);
  // Perturb zero-initialized tensors so every path carries signal.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 0.05);
  for (auto& p : model.parameters()) {
    auto t = p.tensor;
    for (auto& v : t.mutable_data()) v += n(rng);
  }
  const auto x = random_tensor({8, 16, 16, 16, 1}, rng);
  auto leaves = model.parameter_tensors();
  GradCheckOptions opt;
  opt.max_coords_per_tensor = 3;
  opt.seed = 11;
  const auto r = grad_check_leaves([&] { return sum(model.forward(x)); }, leaves, opt);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_GT(r.coords_checked, 100u);
}

TEST(Model, RelativeModeWithZeroTablesMatchesAbsoluteModeWithZeroEmbeddings) {
  auto abs_cfg = ModelConfig::tiny();
  auto rel_cfg = abs_cfg;
  rel_cfg.pos_embed = PosEmbedMode::kRelative;
  SwinModel<double> a(abs_cfg, 5), r(rel_cfg, 6);
  for (const auto& p : a.parameters()) {
    const auto* dst = r.find(p.name);
    if (!dst) {
      ASSERT_NE(p.name.find("pos_embed"), std::string::npos) << p.name;
      for (double v : p.tensor.data()) ASSERT_EQ(v, 0.0);
      continue;
    }
    auto t = *dst;
    std::copy(p.tensor.data().begin(), p.tensor.data().end(), t.mutable_data().begin());
  }
  for (const auto& p : r.parameters()) {
    if (p.name.find("relative_table") == std::string::npos) continue;
    for (double v : p.tensor.data()) ASSERT_EQ(v, 0.0);
  }
  std::mt19937_64 rng(7);
  const auto x = random_tensor({8, 16, 16, 16, 1}, rng);
  EXPECT_LT(max_abs_diff(a.forward(x), r.forward(x)), 1e-12);
}

TEST(Model, CloneCastAndSnapshot) {
  SwinModel<double> model(ModelConfig::tiny(), 2);
  auto copy = model.clone();
  auto t = *copy.find("head.fc2.bias");
  t.mutable_data()[0] = 3.0;
  EXPECT_EQ(model.find("head.fc2.bias")->data()[0], 0.0);

  const auto snap = model.snapshot();
  auto w = *model.find("patch_embed.weight");
  w.mutable_data()[0] += 1;
  model.restore(snap);
  EXPECT_EQ(model.find("patch_embed.weight")->data()[0], snap[0][0]);

  const auto f = model.cast<float>();
  const auto back = f.cast<double>();
  for (std::size_t i = 0; i < model.parameters().size(); ++i)
    for (Index j = 0; j < model.parameters()[i].tensor.numel(); ++j)
      ASSERT_EQ(back.parameters()[i].tensor.data()[j], double(float(model.parameters()[i].tensor.data()[j])));
}

TEST(Model, ResetHeadKeepsBackbone) {
  SwinModel<double> model(ModelConfig::tiny(), 3);
  const auto before = model.snapshot();
  model.reset_head(HeadKind::kEmbedding, 7, 99);
  EXPECT_EQ(model.config().head, HeadKind::kEmbedding);
  EXPECT_EQ(model.find("head.fc2.weight")->dim(1), 7);
  for (std::size_t i = 0; i < model.parameters().size(); ++i)
    if (model.parameters()[i].name.rfind("head.", 0) != 0) {
      const auto d = model.parameters()[i].tensor.data();
      EXPECT_TRUE(std::equal(d.begin(), d.end(), before[i].begin())) << model.parameters()[i].name;
    }
}

TEST(Model, InputShapeIsValidated) {
  SwinModel<double> model(ModelConfig::tiny(), 0);
  EXPECT_THROW(model.forward(TD({8, 12, 16, 16, 1})), ShapeError);
  auto bad = ModelConfig::tiny();
  bad.heads[0] = 3;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ModelConfig::tiny();
  bad.input_dims[1] = 15;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  const auto dir = testing::scratch_dir("model_ckpt");
  SwinModel<float> model(ModelConfig::tiny(), 8);
  AdamWState<float> opt;
  opt.step = 17;
  std::mt19937_64 rng(8);
  std::normal_distribution<float> n;
  for (const auto& p : model.parameters()) {
    auto t = p.tensor;
    for (auto& v : t.mutable_data()) v = n(rng);
    opt.m.emplace_back(p.tensor.numel());
    opt.v.emplace_back(p.tensor.numel());
    for (auto& v : opt.m.back()) v = n(rng);
    for (auto& v : opt.v.back()) v = std::abs(n(rng));
  }
  save_checkpoint(dir / "c.s4d", model, &opt, {{"note", "two words"}});
  const auto c = read_container(dir / "c.s4d");
  EXPECT_EQ(c.meta_value("note").value_or(""), "two words");
  EXPECT_EQ(config_from_container(c), model.config());
  const auto loaded = load_model<float>(c);
  for (std::size_t i = 0; i < model.parameters().size(); ++i) {
    EXPECT_EQ(loaded.parameters()[i].name, model.parameters()[i].name);
    EXPECT_TRUE(testing::bitwise_equal(loaded.parameters()[i].tensor, model.parameters()[i].tensor));
  }
  const auto state = load_optimizer<float>(c, loaded);
  EXPECT_EQ(state.step, 17);
  EXPECT_EQ(state.m, opt.m);
  EXPECT_EQ(state.v, opt.v);
  // Saving the loaded model again reproduces the file byte for byte.
  save_checkpoint(dir / "d.s4d", loaded, &state, {{"note", "two words"}});
  std::ifstream a(dir / "c.s4d", std::ios::binary), b(dir / "d.s4d", std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
}

TEST(Checkpoint, StrictNamesAndShapes) {
  SwinModel<float> model(ModelConfig::tiny(), 1);
  auto c = make_checkpoint(model);
  auto missing = c;
  missing.tensors.erase(missing.tensors.begin() + 3);
  EXPECT_THROW(load_parameters(model, missing), ValidationError);
  auto other = ModelConfig::tiny();
  other.channels = 8;
  SwinModel<float> wide(other, 1);
  EXPECT_THROW(load_parameters(wide, c), ShapeError);
  // A different head loads when the head is skipped.
  SwinModel<float> emb(model.config(), 2);
  emb.reset_head(HeadKind::kEmbedding, 8, 3);
  EXPECT_NO_THROW(load_parameters(emb, c, false));
  EXPECT_TRUE(testing::bitwise_equal(*emb.find("patch_embed.weight"), *model.find("patch_embed.weight")));
}

TEST(Container, RejectsCorruptFiles) {
  const auto dir = testing::scratch_dir("model_container");
  EXPECT_THROW(read_container(dir / "absent.s4d"), RuntimeFailure);
  {
    std::ofstream out(dir / "bad.s4d");
    out << "not-a-container\n";
  }
  EXPECT_THROW(read_container(dir / "bad.s4d"), RuntimeFailure);
  Container c;
  c.kind = "test";
  c.tensors.push_back({"a", {2, 3}, {1, 2, 3, 4, 5, 6}});
  c.tensors.push_back({"s", {}, {7}});
  write_container(dir / "ok.s4d", c);
  const auto r = read_container(dir / "ok.s4d");
  ASSERT_EQ(r.tensors.size(), 2u);
  EXPECT_EQ(r.tensors[0].values, c.tensors[0].values);
  EXPECT_EQ(r.tensors[1].shape, Shape{});
  std::filesystem::resize_file(dir / "ok.s4d", std::filesystem::file_size(dir / "ok.s4d") - 4);
  EXPECT_THROW(read_container(dir / "ok.s4d"), RuntimeFailure);
}

}  // namespace
}  // namespace swin4d
