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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swin4d/data.hpp"
#include "swin4d/model.hpp"
#include "swin4d/objectives.hpp"
#include "swin4d/optim.hpp"

namespace swin4d {

enum class Task { kSex, kAge, kIntelligence, kPretrain };

std::string to_string(Task task);
Task parse_task(const std::string& text);
HeadKind head_for(Task task);
// "auc" for sex, "mse" for the regression tasks, "loss" for pretrain.
std::string selection_metric(Task task);
bool higher_is_better(Task task);

struct MetricRecord {
  int epoch = 0;
  std::string split;
  std::string metric;
  double value = 0.0;
  bool operator==(const MetricRecord&) const = default;
};

// Tab-separated "epoch split metric value" lines; values keep 17 significant digits.
class MetricsLog {
 public:
  void add(int epoch, std::string split, std::string metric, double value);
  const std::vector<MetricRecord>& records() const { return records_; }
  std::optional<double> find(int epoch, const std::string& split, const std::string& metric) const;
  std::string to_tsv() const;
  void write(const std::filesystem::path& path) const;
  static MetricsLog read(const std::filesystem::path& path);

 private:
  std::vector<MetricRecord> records_;
};

struct TrainOptions {
  int epochs = 10;
  // Sub-sequences per optimizer step; pretraining uses batch_size / 2 subjects.
  int batch_size = 8;
  double lr = 1e-3;
  double warmup_fraction = 0.05;
  // Warmup plus cosine decay; off means a constant lr (used for finetuning).
  bool use_schedule = true;
  AdamWHyper adamw;
  bool augment = false;
  AugmentOptions augmentation;
  ContrastiveOptions contrastive;
  std::uint64_t seed = 0;
  bool eval_test = true;
};

// Learning rate applied at optimizer step `step` (1-based) of `total_steps`.
double step_lr(const TrainOptions& opt, std::int64_t step, std::int64_t total_steps);

template <typename T>
struct TrainResult {
  MetricsLog log;
  int best_epoch = 0;
  double best_value = 0.0;
  AdamWState<T> optimizer;
};

// Outputs of every sub-sequence of one subject, in window order.
template <typename T>
std::vector<std::vector<double>> window_outputs(const SwinModel<T>& model, const Volume& volume);

// Mean of the per-window scalar outputs (logit or regression prediction).
template <typename T>
double infer_subject(const SwinModel<T>& model, const SubjectRecord& subject);

struct EvalResult {
  std::vector<double> predictions;
  std::vector<std::vector<double>> windows;
  std::map<std::string, double> metrics;
};

// Subject-level metrics over `subjects[indices]`. For pretrain the contrastive
// loss is evaluated with augmentations drawn from a fixed seed.
template <typename T>
EvalResult evaluate(const SwinModel<T>& model, const std::vector<SubjectRecord>& subjects,
                    const std::vector<std::size_t>& indices, Task task, const TrainOptions& opt = {});

// Epoch 0 is an evaluation before any update. The model ends at the weights
// of the best validation epoch (earliest on ties); throws RuntimeFailure if
// the loss becomes non-finite.
template <typename T>
TrainResult<T> train(SwinModel<T>& model, const std::vector<SubjectRecord>& subjects, const DataSplit& split, Task task,
                     const TrainOptions& opt, const std::function<void(const MetricRecord&)>& on_record = {});

extern template struct TrainResult<float>;
extern template struct TrainResult<double>;

}  // namespace swin4d
