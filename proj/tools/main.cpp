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

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/run_config.hpp"
#include "swin4d/error.hpp"

namespace {

using swin4d::KeyValues;
using namespace swin4d::cli;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> task, pos_embed, out, data, checkpoint, split;
  std::optional<long long> subseq_len;
  std::vector<std::string> sets;
  CommandFlags command;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "key = value config file");
  sub->add_option("--seed", f.seed, "seed for data, split, init and training");
  sub->add_option("--task", f.task, "sex, age, intelligence or pretrain");
  sub->add_option("--pos-embed", f.pos_embed, "absolute or relative");
  sub->add_option("--subseq-len", f.subseq_len, "frames per sub-sequence (model input T)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--data", f.data, "dataset directory");
  sub->add_option("--checkpoint", f.checkpoint, "checkpoint file");
  sub->add_option("--split", f.split, "train, val or test");
  sub->add_option("--set", f.sets, "extra key=value override (repeatable)");
  sub->add_flag("--json", f.command.json, "machine-readable output");
}

KeyValues overrides(const Flags& f) {
  KeyValues kv;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw swin4d::ConfigError("--set expects key=value, got '" + s + "'");
    kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) kv.emplace_back("seed", std::to_string(*f.seed));
  if (f.task) kv.emplace_back("task", *f.task);
  if (f.pos_embed) kv.emplace_back("pos_embed", *f.pos_embed);
  if (f.subseq_len) kv.emplace_back("subseq_len", std::to_string(*f.subseq_len));
  if (f.out) kv.emplace_back("out", *f.out);
  if (f.data) kv.emplace_back("data", *f.data);
  if (f.checkpoint) kv.emplace_back("checkpoint", *f.checkpoint);
  if (f.split) kv.emplace_back("split", *f.split);
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swin4d: 4D windowed-attention transformer toolkit"};
  app.require_subcommand(1);
  app.footer("Settings (key = value in --config files; defaults shown):\n" + describe(RunConfig{}));
  Flags flags;
  using Runner = int (*)(const RunConfig&, const CommandFlags&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Runner>> commands = {
      {"synth", "generate a synthetic dataset", run_synth},
      {"train", "train from scratch (supervised or --task pretrain)", run_train},
      {"eval", "subject-level metrics of a checkpoint on a split", run_eval},
      {"finetune", "train from a checkpoint at a reduced learning rate", run_finetune},
      {"count", "parameter, FLOP, window and receptive-field report", run_count},
      {"bench", "forward-pass throughput", run_bench},
      {"attribute", "IG-SQ attribution maps on a split", run_attribute},
  };
  std::map<CLI::App*, Runner> runners;
  for (const auto& [name, help, runner] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    if (name == "eval") sub->add_flag("--windows", flags.command.windows, "per-subject window homogeneity");
    runners[sub] = runner;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    const RunConfig cfg = parse_config(flags.config, overrides(flags));
    for (const auto& [sub, runner] : runners)
      if (sub->parsed()) return runner(cfg, flags.command, std::cout);
    return 1;
  } catch (const swin4d::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
