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

#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "swin4d/analysis.hpp"
#include "swin4d/attribution.hpp"
#include "swin4d/checkpoint.hpp"
#include "swin4d/error.hpp"
#include "swin4d/metrics.hpp"

namespace swin4d::cli {

using nlohmann::json;

namespace {

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void require_path(const std::filesystem::path& p, const std::string& key, const std::string& command) {
  if (p.empty()) throw ValidationError(command + ": missing required setting '" + key + "'");
}

std::vector<SubjectRecord> load_prepared(const RunConfig& cfg, const ModelConfig& model, const std::string& command) {
  require_path(cfg.data_dir, "data", command);
  auto subjects = read_dataset(cfg.data_dir);
  prepare_dataset(subjects, {model.input_dims[1], model.input_dims[2], model.input_dims[3]});
  return subjects;
}

const std::vector<std::size_t>& split_part(const DataSplit& split, const std::string& name) {
  if (name == "train") return split.train;
  if (name == "val") return split.val;
  return split.test;
}

std::filesystem::path prepare_out(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  return cfg.out_dir;
}

void print_record(std::ostream& out, const MetricRecord& r, bool json_lines) {
  if (json_lines) {
    out << json{{"epoch", r.epoch}, {"split", r.split}, {"metric", r.metric}, {"value", r.value}}.dump() << '\n';
  } else {
    out << "epoch " << r.epoch << '\t' << r.split << '\t' << r.metric << '\t' << num(r.value, 8) << '\n';
  }
  out.flush();
}

int train_and_save(const RunConfig& cfg, SwinModel<float>& model, TrainOptions opt, const CommandFlags& flags,
                   std::ostream& out, const std::string& command, const std::string& source) {
  const auto subjects = load_prepared(cfg, model.config(), command);
  const DataSplit split = split_subjects(subjects.size(), cfg.split);
  const auto dir = prepare_out(cfg);
  const auto result =
      train(model, subjects, split, cfg.task, opt, [&](const MetricRecord& r) { print_record(out, r, flags.json); });
  result.log.write(dir / "metrics.tsv");
  save_checkpoint(dir / "checkpoint.s4d", model, &result.optimizer,
                  {{"task", to_string(cfg.task)},
                   {"best_epoch", std::to_string(result.best_epoch)},
                   {"seed", std::to_string(cfg.seed)},
                   {"source", source}});
  if (flags.json) {
    out << json{{"best_epoch", result.best_epoch},
                {"selection_metric", selection_metric(cfg.task)},
                {"best_value", result.best_value},
                {"checkpoint", (dir / "checkpoint.s4d").string()},
                {"metrics_log", (dir / "metrics.tsv").string()}}
               .dump()
        << '\n';
  } else {
    out << "best epoch " << result.best_epoch << " (val " << selection_metric(cfg.task) << " "
        << num(result.best_value, 8) << ")\n"
        << "wrote " << (dir / "checkpoint.s4d").string() << " and " << (dir / "metrics.tsv").string() << '\n';
  }
  return 0;
}

SwinModel<float> load_checkpoint_model(const RunConfig& cfg, const std::string& command) {
  require_path(cfg.checkpoint, "checkpoint", command);
  return load_model<float>(read_container(cfg.checkpoint));
}

}  // namespace

int run_synth(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
  const auto dir = cfg.data_dir.empty() ? cfg.out_dir : cfg.data_dir;
  const auto subjects = synthesize_dataset(cfg.synth);
  write_dataset(dir, subjects);
  const double mean_auc = mean_intensity_auc(subjects);
  const double band_auc = band_power_auc(subjects, cfg.synth.period);
  if (flags.json) {
    out << json{{"dir", dir.string()},
                {"subjects", subjects.size()},
                {"dims", cfg.synth.dims},
                {"amplitude", cfg.synth.amplitude},
                {"mean_intensity_auc", mean_auc},
                {"band_power_auc", band_auc}}
               .dump()
        << '\n';
  } else {
    out << "wrote " << subjects.size() << " subjects of " << dims_to_string(cfg.synth.dims) << " to " << dir.string()
        << '\n'
        << "probe auc: mean intensity " << num(mean_auc) << ", band power " << num(band_auc) << '\n';
  }
  return 0;
}

int run_train(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
  SwinModel<float> model(cfg.model, cfg.seed);
  return train_and_save(cfg, model, cfg.train, flags, out, "train", "scratch");
}

int run_finetune(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
  require_path(cfg.checkpoint, "checkpoint", "finetune");
  const Container ckpt = read_container(cfg.checkpoint);
  ModelConfig mc = config_from_container(ckpt);
  const bool same_head = mc.head == head_for(cfg.task);
  mc.head = head_for(cfg.task);
  SwinModel<float> model(mc, cfg.seed);
  load_parameters(model, ckpt, same_head);
  TrainOptions opt = cfg.train;
  opt.lr *= cfg.finetune_lr_scale;
  opt.use_schedule = false;
  return train_and_save(cfg, model, opt, flags, out, "finetune", cfg.checkpoint.string());
}

int run_eval(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
  const SwinModel<float> model = load_checkpoint_model(cfg, "eval");
  Task task = cfg.task;
  if (model.config().head != head_for(task)) {
    if (model.config().head == HeadKind::kEmbedding) task = Task::kPretrain;
    else throw ValidationError("eval: checkpoint head " + to_string(model.config().head) + " does not fit task " + to_string(task));
  }
  const auto subjects = load_prepared(cfg, model.config(), "eval");
  const DataSplit split = split_subjects(subjects.size(), cfg.split);
  const auto& indices = split_part(split, cfg.eval_split);
  const EvalResult r = evaluate(model, subjects, indices, task, cfg.train);
  json report{{"split", cfg.eval_split}, {"task", to_string(task)}, {"subjects", indices.size()}};
  for (const auto& [k, v] : r.metrics) report["metrics"][k] = v;
  std::optional<WindowHomogeneity> homog;
  if (flags.windows) {
    if (task != Task::kSex) throw ValidationError("eval: --windows needs the sex task");
    std::vector<std::vector<int>> preds;
    std::vector<int> labels;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      std::vector<int> p;
      for (double logit : r.windows[i]) p.push_back(logit > 0 ? 1 : 0);
      preds.push_back(std::move(p));
      labels.push_back(subjects[indices[i]].sex);
    }
    homog = window_homogeneity(preds, labels);
    report["windows"] = {{"histogram", homog->counts}, {"fraction_identical", homog->fraction_identical}};
  }
  if (flags.json) {
    out << report.dump() << '\n';
    return 0;
  }
  out << "split " << cfg.eval_split << " (" << indices.size() << " subjects), task " << to_string(task) << '\n';
  for (const auto& [k, v] : r.metrics) out << "  " << k << '\t' << num(v, 17) << '\n';
  if (homog) {
    out << "per-subject window accuracy histogram:\n";
    for (std::size_t b = 0; b < homog->counts.size(); ++b)
      out << "  " << num(static_cast<double>(b) / static_cast<double>(homog->counts.size() - 1), 2) << '\t'
          << homog->counts[b] << '\n';
    out << "  subjects with identical window predictions: " << num(homog->fraction_identical) << '\n';
  }
  return 0;
}

int run_count(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
  const ModelConfig& mc = cfg.model;
  const ParamReport params = param_count(mc);
  const FlopsReport flops = flops_estimate(mc);
  const ReceptiveField rf = receptive_field(mc);
  const Dims4 t1 = mc.stage_tokens(0);
  const auto terms = complexity_terms(t1[0] * t1[1] * t1[2] * t1[3], mc.channels, mc.window[0], mc.window[1]);
  const double windowed_ratio = static_cast<double>(terms.windowed) / static_cast<double>(terms.linear);
  const double global_ratio = static_cast<double>(terms.global) / static_cast<double>(terms.linear);
  const WindowCounts demo = count_windows({4, 8, 8, 8}, {2, 4, 4, 4});

  json stages = json::array();
  for (int s = 0; s < kNumStages; ++s) {
    const Dims4 tok = mc.stage_tokens(s);
    const WindowCounts wc = count_windows(tok, mc.window);
    const bool global = s == kNumStages - 1;
    stages.push_back({{"stage", s + 1},
                      {"tokens", tok},
                      {"channels", mc.stage_channels(s)},
                      {"attention", global ? "global" : "window"},
                      {"windows_regular", global ? 1 : wc.regular},
                      {"windows_shifted", global ? 1 : wc.shifted},
                      {"flops", flops.stage_totals[s]},
                      {"span_spatial", rf.stages[s].spatial},
                      {"span_temporal", rf.stages[s].temporal}});
  }
  json modules = json::object();
  for (const auto& [m, n] : params.modules) modules[m] = n;
  json report{{"config", mc.input_dims},
              {"params_total", params.total},
              {"params_by_module", modules},
              {"flops_total", flops.total},
              {"stage1_windowed_over_linear", windowed_ratio},
              {"stage1_global_over_linear", global_ratio},
              {"window_demo", {{"tokens", {4, 8, 8, 8}}, {"window", {2, 4, 4, 4}}, {"regular", demo.regular},
                               {"shifted", demo.shifted}}},
              {"full_spatial_stage", rf.full_spatial_stage},
              {"full_temporal_stage", rf.full_temporal_stage},
              {"stages", stages}};
  if (flags.json) {
    out << report.dump() << '\n';
    return 0;
  }
  out << "input " << dims_to_string(mc.input_dims) << ", patch " << mc.patch_size << ", C " << mc.channels
      << ", pos_embed " << to_string(mc.pos_embed) << '\n';
  out << "parameters " << params.total << " (" << num(static_cast<double>(params.total) / 1e6, 4) << "M)\n";
  for (const auto& [m, n] : params.modules) out << "  " << m << '\t' << n << '\n';
  out << "stage\ttokens\t\tC\tattn\twindows(reg/shift)\tflops\t\tspan(vox)\tspan(frames)\n";
  for (const auto& s : stages) {
    out << s["stage"].get<int>() << '\t' << dims_to_string(s["tokens"].get<Dims4>()) << '\t' << s["channels"] << '\t'
        << s["attention"].get<std::string>() << '\t' << s["windows_regular"] << '/' << s["windows_shifted"] << "\t\t\t"
        << s["flops"] << '\t' << s["span_spatial"] << "^3\t\t" << s["span_temporal"] << '\n';
  }
  out << "flops total " << flops.total << " (" << num(static_cast<double>(flops.total) / 1e9, 4) << "G)\n";
  out << "stage-1 windowed/linear term ratio " << num(windowed_ratio, 4) << ", global/linear " << num(global_ratio, 4)
      << '\n';
  out << "window demo 4x8x8x8 tokens, 2x4x4x4 window: " << demo.regular << " regular, " << demo.shifted
      << " shifted\n";
  out << "full spatial coverage at stage " << rf.full_spatial_stage << ", full temporal coverage at stage "
      << rf.full_temporal_stage << '\n';
  return 0;
}

int run_bench(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
  const ThroughputReport r =
      throughput_bench(cfg.model, cfg.bench.samples, cfg.bench.warmup, cfg.bench.repetitions, cfg.seed);
  if (flags.json) {
    out << json{{"samples", r.n_samples},
                {"repetitions", r.repetitions},
                {"samples_per_second", r.samples_per_second},
                {"mean", r.mean},
                {"stddev", r.stddev},
                {"flops_per_sample", r.flops_per_sample}}
               .dump()
        << '\n';
  } else {
    out << "throughput " << num(r.mean, 5) << " +- " << num(r.stddev, 3) << " samples/s over " << r.repetitions
        << " x " << r.n_samples << " forward passes\n"
        << "analytic flops per sample " << r.flops_per_sample << '\n';
  }
  return 0;
}

int run_attribute(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
  const SwinModel<float> model = load_checkpoint_model(cfg, "attribute");
  if (model.config().head != HeadKind::kBinaryLogit) throw ValidationError("attribute: checkpoint must be a sex-task model");
  const auto subjects = load_prepared(cfg, model.config(), "attribute");
  const DataSplit split = split_subjects(subjects.size(), cfg.split);
  const auto& indices = split_part(split, cfg.eval_split);
  if (indices.empty()) throw ValidationError("attribute: split " + cfg.eval_split + " is empty");
  const auto f = model_output(model);
  const Index len = model.config().input_dims[0];
  std::vector<AttributionMap<float>> maps;
  std::vector<bool> correct;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const SubjectRecord& s = subjects[indices[i]];
    const int pred = infer_subject(model, s) > 0 ? 1 : 0;
    const Tensor<float> x = to_input<float>(extract_frames(s.volume, 0, len));
    maps.push_back(ig_sq(f, x, background_baseline(x), cfg.attribution.steps, cfg.attribution.noise_sigma,
                         cfg.attribution.samples, cfg.seed + i));
    correct.push_back(pred == s.sex);
  }
  const GroupMap group = aggregate_maps(maps, correct, cfg.attribution.smooth_sigma);
  const double factor = localization_factor(group, signature_blob(group.dims));
  const auto dir = prepare_out(cfg);
  Container c;
  c.kind = "attribution";
  c.meta = {{"split", cfg.eval_split},
            {"steps", std::to_string(cfg.attribution.steps)},
            {"noise_sigma", num(cfg.attribution.noise_sigma, 17)},
            {"samples", std::to_string(cfg.attribution.samples)},
            {"smooth_sigma", num(cfg.attribution.smooth_sigma, 17)},
            {"baseline", "background"}};
  c.tensors.push_back({"group_map", {group.dims[0], group.dims[1], group.dims[2]},
                       std::vector<float>(group.values.begin(), group.values.end())});
  write_container(dir / "attribution.s4d", c);
  const auto slice_dir = dir / "slices";
  std::filesystem::create_directories(slice_dir);
  for (Index d = 0; d < group.dims[2]; ++d) {
    std::ofstream csv(slice_dir / ("d" + std::to_string(d) + ".csv"));
    for (Index h = 0; h < group.dims[0]; ++h) {
      for (Index w = 0; w < group.dims[1]; ++w)
        csv << (w ? "," : "") << num(group.values[(h * group.dims[1] + w) * group.dims[2] + d], 8);
      csv << '\n';
    }
    if (!csv) throw RuntimeFailure("attribute: cannot write slice CSV in " + slice_dir.string());
  }
  const auto n_correct = std::count(correct.begin(), correct.end(), true);
  if (flags.json) {
    out << json{{"subjects", indices.size()},
                {"correct", n_correct},
                {"blob_localization_factor", factor},
                {"map", (dir / "attribution.s4d").string()}}
               .dump()
        << '\n';
  } else {
    out << "attributed " << indices.size() << " subjects (" << n_correct << " correct), blob localization factor "
        << num(factor, 4) << '\n'
        << "wrote " << (dir / "attribution.s4d").string() << " and " << group.dims[2] << " slice CSVs in "
        << slice_dir.string() << '\n';
  }
  return 0;
}

}  // namespace swin4d::cli
