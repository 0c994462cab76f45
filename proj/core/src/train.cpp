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

#include "swin4d/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "swin4d/autodiff.hpp"
#include "swin4d/error.hpp"
#include "swin4d/metrics.hpp"
#include "swin4d/ops.hpp"
#include "swin4d/parallel.hpp"

namespace swin4d {

std::string to_string(Task task) {
  switch (task) {
    case Task::kSex: return "sex";
    case Task::kAge: return "age";
    case Task::kIntelligence: return "intelligence";
    case Task::kPretrain: return "pretrain";
  }
  return "?";
}

Task parse_task(const std::string& text) {
  for (Task t : {Task::kSex, Task::kAge, Task::kIntelligence, Task::kPretrain})
    if (to_string(t) == text) return t;
  throw ConfigError("task: expected sex, age, intelligence or pretrain, got '" + text + "'");
}

HeadKind head_for(Task task) {
  switch (task) {
    case Task::kSex: return HeadKind::kBinaryLogit;
    case Task::kPretrain: return HeadKind::kEmbedding;
    default: return HeadKind::kScalarRegression;
  }
}

std::string selection_metric(Task task) {
  switch (task) {
    case Task::kSex: return "auc";
    case Task::kPretrain: return "loss";
    default: return "mse";
  }
}

bool higher_is_better(Task task) { return task == Task::kSex; }

void MetricsLog::add(int epoch, std::string split, std::string metric, double value) {
  records_.push_back({epoch, std::move(split), std::move(metric), value});
}

std::optional<double> MetricsLog::find(int epoch, const std::string& split, const std::string& metric) const {
  for (const auto& r : records_)
    if (r.epoch == epoch && r.split == split && r.metric == metric) return r.value;
  return std::nullopt;
}

std::string MetricsLog::to_tsv() const {
  std::string out = "epoch\tsplit\tmetric\tvalue\n";
  char buf[64];
  for (const auto& r : records_) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out += std::to_string(r.epoch) + '\t' + r.split + '\t' + r.metric + '\t' + buf + '\n';
  }
  return out;
}

void MetricsLog::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write metrics log " + path.string());
  out << to_tsv();
  if (!out) throw RuntimeFailure("write failed for " + path.string());
}

MetricsLog MetricsLog::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeFailure("cannot open metrics log " + path.string());
  MetricsLog log;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    MetricRecord r;
    std::string value;
    if (!(ls >> r.epoch >> r.split >> r.metric >> value)) throw RuntimeFailure("bad metrics line: " + line);
    r.value = std::strtod(value.c_str(), nullptr);
    log.records_.push_back(r);
  }
  return log;
}

double step_lr(const TrainOptions& opt, std::int64_t step, std::int64_t total_steps) {
  const double lr = lr_schedule(step, total_steps, opt.lr, opt.warmup_fraction);
  return opt.use_schedule ? lr : opt.lr;
}

namespace {

void check_volume(const ModelConfig& cfg, const Volume& v) {
  const Dims4& in = cfg.input_dims;
  if (v.dims[1] != in[1] || v.dims[2] != in[2] || v.dims[3] != in[3])
    throw ShapeError("volume " + dims_to_string(v.dims) + " does not match model input " + dims_to_string(in));
}

double label_of(const SubjectRecord& s, Task task) {
  switch (task) {
    case Task::kSex: return s.sex;
    case Task::kAge: return s.age;
    case Task::kIntelligence: return s.intelligence;
    case Task::kPretrain: break;
  }
  throw ValidationError("pretrain has no scalar label");
}

template <typename T>
std::vector<double> values_of(const Tensor<T>& t) {
  return std::vector<double>(t.data().begin(), t.data().end());
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

template <typename T>
struct PretrainTerms {
  Tensor<T> loss, ic, ll;
  // Mean cosines over anchor pairs; pos/neg pool the pairs of both terms.
  double ic_pos = 0, ic_neg = 0, ll_pos = 0, ll_neg = 0, pos_cos = 0, neg_cos = 0;
};

struct CosTally {
  double pos = 0, neg = 0, pos_n = 0, neg_n = 0;
  void anchor(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      pos += cosine(a[i], b[i]);
      pos_n += 1;
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (j == i) continue;
        neg += cosine(a[i], a[j]) + cosine(a[i], b[j]);
        neg_n += 2;
      }
    }
  }
};

// Two augmented views of every window of each subject in `group`; the first
// views of two distinct random windows form the instance pair.
template <typename T>
PretrainTerms<T> pretrain_terms(const SwinModel<T>& model, const std::vector<SubjectRecord>& subjects,
                                const std::vector<std::size_t>& group, const TrainOptions& opt, std::mt19937_64& rng,
                                std::mt19937_64* dropout_rng) {
  const Index len = model.config().input_dims[0];
  ContrastiveBatch<T> instance{ContrastiveMode::kInstance, {}, {}};
  std::vector<ContrastiveBatch<T>> local;
  std::vector<std::vector<double>> first, second;
  CosTally ll_tally;
  for (std::size_t idx : group) {
    const SubjectRecord& s = subjects[idx];
    check_volume(model.config(), s.volume);
    const auto starts = subsequence_starts(s.volume.dims[0], len);
    if (starts.size() < 2) throw ValidationError("pretrain: subject " + s.subject_id + " has fewer than 2 windows");
    ContrastiveBatch<T> ll{ContrastiveMode::kLocalLocal, {}, {}};
    for (Index start : starts) {
      const Volume frames = extract_frames(s.volume, start, len);
      ll.first.push_back(model.forward(to_input<T>(augment(frames, opt.augmentation, rng)), dropout_rng));
      ll.second.push_back(model.forward(to_input<T>(augment(frames, opt.augmentation, rng)), dropout_rng));
    }
    const auto n = static_cast<std::int64_t>(starts.size());
    const auto p1 = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
    auto p2 = std::uniform_int_distribution<std::int64_t>(0, n - 2)(rng);
    if (p2 >= p1) ++p2;
    instance.first.push_back(ll.first[p1]);
    instance.second.push_back(ll.first[p2]);
    std::vector<std::vector<double>> a, b;
    for (std::size_t p = 0; p < ll.first.size(); ++p) {
      a.push_back(values_of(ll.first[p]));
      b.push_back(values_of(ll.second[p]));
    }
    ll_tally.anchor(a, b);
    first.push_back(a[p1]);
    second.push_back(a[p2]);
    local.push_back(std::move(ll));
  }
  PretrainTerms<T> out;
  out.ic = instance_contrastive_loss(instance, opt.contrastive);
  out.ll = local_local_loss(local, opt.contrastive);
  out.loss = combined_pretrain_loss(out.ic, out.ll);
  CosTally ic_tally;
  ic_tally.anchor(first, second);
  out.ic_pos = ic_tally.pos / ic_tally.pos_n;
  out.ic_neg = ic_tally.neg / ic_tally.neg_n;
  out.ll_pos = ll_tally.pos / ll_tally.pos_n;
  out.ll_neg = ll_tally.neg / ll_tally.neg_n;
  out.pos_cos = (ic_tally.pos + ll_tally.pos) / (ic_tally.pos_n + ll_tally.pos_n);
  out.neg_cos = (ic_tally.neg + ll_tally.neg) / (ic_tally.neg_n + ll_tally.neg_n);
  return out;
}

// Consecutive groups of `size`; a trailing singleton joins the previous group.
std::vector<std::vector<std::size_t>> make_groups(const std::vector<std::size_t>& items, std::size_t size) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); i += size)
    groups.emplace_back(items.begin() + i, items.begin() + std::min(items.size(), i + size));
  if (groups.size() > 1 && groups.back().size() < 2) {
    groups[groups.size() - 2].push_back(groups.back().front());
    groups.pop_back();
  }
  return groups;
}

std::size_t pretrain_group_size(const TrainOptions& opt) { return std::max<std::size_t>(2, opt.batch_size / 2); }

}  // namespace

template <typename T>
std::vector<std::vector<double>> window_outputs(const SwinModel<T>& model, const Volume& volume) {
  check_volume(model.config(), volume);
  NoGradGuard no_grad;
  const Index len = model.config().input_dims[0];
  std::vector<std::vector<double>> out;
  for (Index start : subsequence_starts(volume.dims[0], len))
    out.push_back(values_of(model.forward(to_input<T>(extract_frames(volume, start, len)))));
  return out;
}

template <typename T>
double infer_subject(const SwinModel<T>& model, const SubjectRecord& subject) {
  if (model.config().output_dim() != 1) throw ValidationError("infer_subject: model head is not scalar");
  const auto windows = window_outputs(model, subject.volume);
  double sum = 0;
  for (const auto& w : windows) sum += w[0];
  return sum / static_cast<double>(windows.size());
}

template <typename T>
EvalResult evaluate(const SwinModel<T>& model, const std::vector<SubjectRecord>& subjects,
                    const std::vector<std::size_t>& indices, Task task, const TrainOptions& opt) {
  if (indices.empty()) throw ValidationError("evaluate: empty split");
  if (model.config().head != head_for(task))
    throw ValidationError("evaluate: model head " + to_string(model.config().head) + " does not fit task " +
                          to_string(task));
  EvalResult r;
  if (task == Task::kPretrain) {
    NoGradGuard no_grad;
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    double loss = 0, ic = 0, ll = 0, pos = 0, neg = 0, ic_pos = 0, ic_neg = 0, ll_pos = 0, ll_neg = 0;
    const auto groups = make_groups(indices, pretrain_group_size(opt));
    if (groups.front().size() < 2) throw ValidationError("evaluate: pretrain needs at least 2 subjects");
    for (const auto& g : groups) {
      const auto terms = pretrain_terms(model, subjects, g, opt, rng, nullptr);
      loss += terms.loss.item();
      ic += terms.ic.item();
      ll += terms.ll.item();
      pos += terms.pos_cos;
      neg += terms.neg_cos;
      ic_pos += terms.ic_pos;
      ic_neg += terms.ic_neg;
      ll_pos += terms.ll_pos;
      ll_neg += terms.ll_neg;
    }
    const auto n = static_cast<double>(groups.size());
    r.metrics = {{"loss", loss / n}, {"ic", ic / n}, {"ll", ll / n}, {"pos_cos", pos / n}, {"neg_cos", neg / n},
                 {"ic_pos_cos", ic_pos / n}, {"ic_neg_cos", ic_neg / n}, {"ll_pos_cos", ll_pos / n},
                 {"ll_neg_cos", ll_neg / n}};
    return r;
  }
  r.windows.resize(indices.size());
  r.predictions.resize(indices.size());
  parallel_for(static_cast<std::int64_t>(indices.size()), [&](std::int64_t i) {
    const auto w = window_outputs(model, subjects[indices[i]].volume);
    double sum = 0;
    for (const auto& v : w) {
      r.windows[i].push_back(v[0]);
      sum += v[0];
    }
    r.predictions[i] = sum / static_cast<double>(w.size());
  });
  if (task == Task::kSex) {
    std::vector<int> y;
    for (std::size_t i : indices) y.push_back(subjects[i].sex);
    const bool both = std::count(y.begin(), y.end(), 1) > 0 && std::count(y.begin(), y.end(), 0) > 0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.metrics["auc"] = both ? roc_auc(r.predictions, y) : nan;
    r.metrics["balanced_accuracy"] = both ? balanced_accuracy(r.predictions, y) : nan;
  } else {
    std::vector<double> y;
    for (std::size_t i : indices) y.push_back(label_of(subjects[i], task));
    r.metrics["mse"] = mean_squared_error(r.predictions, y);
    r.metrics["mae"] = mean_absolute_error(r.predictions, y);
  }
  return r;
}

template <typename T>
TrainResult<T> train(SwinModel<T>& model, const std::vector<SubjectRecord>& subjects, const DataSplit& split, Task task,
                     const TrainOptions& opt, const std::function<void(const MetricRecord&)>& on_record) {
  if (model.config().head != head_for(task))
    throw ValidationError("train: model head " + to_string(model.config().head) + " does not fit task " +
                          to_string(task));
  if (split.train.empty()) throw ValidationError("train: empty training split");
  if (split.val.empty()) throw ValidationError("train: empty validation split");
  if (opt.epochs < 0 || opt.batch_size < 1) throw ValidationError("train: epochs must be >= 0 and batch_size >= 1");
  if (task == Task::kPretrain && split.train.size() < 2) throw ValidationError("train: pretrain needs 2 subjects");

  TrainResult<T> result;
  auto params = model.parameter_tensors();
  std::mt19937_64 rng(opt.seed);
  std::mt19937_64* dropout_rng = model.config().dropout > 0 ? &rng : nullptr;
  const Index len = model.config().input_dims[0];

  struct Item {
    std::size_t subject;
    Index start;
  };
  std::vector<Item> items;
  for (std::size_t s : split.train) {
    check_volume(model.config(), subjects[s].volume);
    for (Index start : subsequence_starts(subjects[s].volume.dims[0], len)) items.push_back({s, start});
  }
  const auto batch = static_cast<std::size_t>(opt.batch_size);
  const std::size_t steps_per_epoch = task == Task::kPretrain
                                          ? make_groups(split.train, pretrain_group_size(opt)).size()
                                          : (items.size() + batch - 1) / batch;
  const auto total_steps = static_cast<std::int64_t>(steps_per_epoch) * opt.epochs;
  std::int64_t step = 0;

  auto record = [&](int epoch, const std::string& split_name, const std::string& metric, double value) {
    result.log.add(epoch, split_name, metric, value);
    if (on_record) on_record(result.log.records().back());
  };
  auto log_eval = [&](int epoch) {
    const auto val = evaluate(model, subjects, split.val, task, opt);
    for (const auto& [k, v] : val.metrics) record(epoch, "val", k, v);
    if (opt.eval_test && !split.test.empty()) {
      const auto test = evaluate(model, subjects, split.test, task, opt);
      for (const auto& [k, v] : test.metrics) record(epoch, "test", k, v);
    }
    return val.metrics.at(selection_metric(task));
  };

  const double initial = log_eval(0);
  result.best_epoch = 0;
  result.best_value = initial;
  std::vector<std::vector<T>> best_weights = model.snapshot();
  AdamWState<T> best_state;

  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    double loss_sum = 0;
    std::size_t loss_count = 0;
    auto check = [&](double v) {
      if (!std::isfinite(v))
        throw RuntimeFailure("training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                             std::to_string(step + 1));
    };
    auto apply = [&] {
      ++step;
      adamw_step(std::span<Tensor<T>>(params), result.optimizer, opt.adamw,
                 step_lr(opt, std::min(step, total_steps), total_steps));
    };
    if (task == Task::kPretrain) {
      std::vector<std::size_t> order = split.train;
      std::shuffle(order.begin(), order.end(), rng);
      for (const auto& group : make_groups(order, pretrain_group_size(opt))) {
        model.zero_grad();
        const auto terms = pretrain_terms(model, subjects, group, opt, rng, dropout_rng);
        check(terms.loss.item());
        backward(terms.loss);
        loss_sum += terms.loss.item();
        ++loss_count;
        apply();
      }
    } else {
      std::shuffle(items.begin(), items.end(), rng);
      for (std::size_t b = 0; b < items.size(); b += batch) {
        const std::size_t end = std::min(items.size(), b + batch);
        const T weight = T(1) / static_cast<T>(end - b);
        model.zero_grad();
        for (std::size_t i = b; i < end; ++i) {
          const SubjectRecord& s = subjects[items[i].subject];
          Volume frames = extract_frames(s.volume, items[i].start, len);
          if (opt.augment) frames = augment(frames, opt.augmentation, rng);
          const Tensor<T> out = model.forward(to_input<T>(frames), dropout_rng);
          const Tensor<T> loss = task == Task::kSex ? bce_loss(out, {label_of(s, task)})
                                                    : mse_loss(out, Tensor<T>::scalar(T(label_of(s, task))));
          check(loss.item());
          backward(scale(loss, weight));
          loss_sum += loss.item();
          ++loss_count;
        }
        apply();
      }
    }
    record(epoch, "train", "loss", loss_sum / static_cast<double>(loss_count));
    const double value = log_eval(epoch);
    // Trained epochs only; NaN never wins, ties keep the earlier epoch.
    const bool better = epoch == 1 || (!std::isnan(value) && (std::isnan(result.best_value) ||
                                                               (higher_is_better(task) ? value > result.best_value
                                                                                       : value < result.best_value)));
    if (better) {
      result.best_epoch = epoch;
      result.best_value = value;
      best_weights = model.snapshot();
      best_state = result.optimizer;
    }
  }
  if (opt.epochs > 0) {
    model.restore(best_weights);
    result.optimizer = best_state;
  }
  return result;
}

#define SWIN4D_INSTANTIATE_TRAIN(T)                                                                              \
  template std::vector<std::vector<double>> window_outputs(const SwinModel<T>&, const Volume&);                  \
  template double infer_subject(const SwinModel<T>&, const SubjectRecord&);                                      \
  template EvalResult evaluate(const SwinModel<T>&, const std::vector<SubjectRecord>&,                           \
                               const std::vector<std::size_t>&, Task, const TrainOptions&);                      \
  template TrainResult<T> train(SwinModel<T>&, const std::vector<SubjectRecord>&, const DataSplit&, Task,        \
                                const TrainOptions&, const std::function<void(const MetricRecord&)>&);           \
  template struct TrainResult<T>;

SWIN4D_INSTANTIATE_TRAIN(float)
SWIN4D_INSTANTIATE_TRAIN(double)

}  // namespace swin4d
