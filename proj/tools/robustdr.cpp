// Copyright 2026 The RobustDR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// robustdr: command-line driver for the experiment pipeline.
//
// Exit codes: 0 success, 1 usage or config error, 2 data validation error,
// 3 runtime failure.

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "robustdr/config.hpp"
#include "robustdr/pipeline.hpp"
#include "robustdr/synthetic.hpp"

namespace {

using robustdr::ExitCode;

struct Overrides {
  std::string config;
  std::optional<std::string> mode;
  std::optional<double> typo_p;
  std::optional<std::string> setting;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  bool force = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "experiment config (YAML)")->required();
  sub->add_option("--mode", o.mode, "restrict to one training mode: DR, DR_Aug, DR_CL, DR_Aug_CL");
  sub->add_option("--typo-p", o.typo_p, "per-word typo probability for test sets");
  sub->add_option("--typo-setting,--setting", o.setting,
                  "restrict to one typo setting: random, nonstop, discriminative");
  sub->add_option("--seed", o.seed, "override the config seed");
  sub->add_option("--output", o.output, "override paths.output");
  sub->add_flag("--force", o.force, "re-run stages whose inputs are unchanged");
}

robustdr::ExperimentConfig resolve(const Overrides& o) {
  auto c = robustdr::load_config(o.config);
  if (o.mode) c.modes = {robustdr::parse_train_mode(*o.mode)};
  if (o.typo_p) {
    if (*o.typo_p < 0.0 || *o.typo_p > 1.0) throw robustdr::ConfigError("--typo-p: must be in [0, 1]");
    c.typo_p = *o.typo_p;
  }
  if (o.setting) c.settings = {robustdr::parse_typo_setting(*o.setting)};
  if (o.seed) c.seed = *o.seed;
  if (o.output) c.paths.output = *o.output;
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"Typo-robustness experiments for dual-encoder dense retrieval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(robustdr::kVersion));

  Overrides o;
  auto per_mode = [](void (robustdr::Pipeline::*fn)(robustdr::TrainMode)) {
    return [fn](robustdr::Pipeline& p) {
      for (auto m : p.config().modes) (p.*fn)(m);
    };
  };
  const std::vector<std::tuple<std::string, std::string, std::function<void(robustdr::Pipeline&)>>>
      stages = {
          {"ingest", "validate the corpus, questions and judgments",
           [](robustdr::Pipeline& p) { p.ingest(); }},
          {"build-vocab", "build the subword vocabulary",
           [](robustdr::Pipeline& p) { p.build_vocabulary(); }},
          {"perturb", "generate typoed test sets", [](robustdr::Pipeline& p) { p.perturb(); }},
          {"train", "train dual encoders", per_mode(&robustdr::Pipeline::train)},
          {"index", "encode the passage collection", per_mode(&robustdr::Pipeline::index)},
          {"search", "retrieve for clean, typoed and typo-removed questions",
           per_mode(&robustdr::Pipeline::search)},
          {"evaluate", "compute metrics and significance", per_mode(&robustdr::Pipeline::evaluate)},
          {"analyze", "frequency, importance and trend reports",
           [](robustdr::Pipeline& p) { p.analyze(); }},
          {"experiment", "run every stage", [](robustdr::Pipeline& p) { p.experiment(); }},
      };

  std::function<void(robustdr::Pipeline&)> chosen;
  for (const auto& [name, help, fn] : stages) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    sub->callback([&chosen, fn = fn]() { chosen = fn; });
  }

  robustdr::SyntheticConfig synth;
  std::string synth_out;
  auto* gen = app.add_subcommand("generate", "write the synthetic biography dataset");
  gen->add_option("--out", synth_out, "output directory")->required();
  gen->add_option("--seed", synth.seed, "generator seed");
  gen->callback([&]() {
    const auto ds = robustdr::generate_synthetic(synth);
    const std::filesystem::path dir(synth_out);
    std::filesystem::create_directories(dir);
    robustdr::write_passages((dir / "passages.tsv").string(), ds.passages);
    robustdr::write_questions((dir / "train_questions.tsv").string(), ds.train);
    robustdr::write_questions((dir / "dev_questions.tsv").string(), ds.dev);
    robustdr::write_questions((dir / "test_questions.tsv").string(), ds.test);
    robustdr::write_qrels((dir / "qrels.tsv").string(), ds.qrels);
    std::cerr << "generate: wrote " << ds.passages.size() << " passages to " << dir.string()
              << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }
  if (gen->parsed()) return 0;

  robustdr::Pipeline pipeline(resolve(o), o.force);
  chosen(pipeline);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const robustdr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kUsage);
  } catch (const robustdr::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kData);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kRuntime);
  }
}
