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

// Experiment configuration: YAML schema, parsing and field-level validation.
//
//   seed: 13                        # required
//   paths:
//     passages: passages.tsv        # relative to the config file
//     train_questions: ...
//     dev_questions: ...            # optional
//     test_questions: ...
//     qrels: ...
//     misspellings: ...             # optional, built-in list otherwise
//     keyboard: ...                 # optional, QWERTY otherwise
//     stopwords: ...                # optional, built-in list otherwise
//     output: out/                  # artifact directory
//   model:      {dim: 128, vocab_size: 2048}
//   training:   {modes: [DR, DR_Aug_CL], batch_size: 48, steps: 2000, lr: 0.001,
//                warmup: 0.1, weights: [w1, w2, w3], typo_p: 0.2, eval_every: 0}
//   evaluation: {metrics: [mrr@10, recall@10, answer_recall@20]}
//   typos:      {p: 0.2, settings: [RandomWords, NonStopwords, DiscriminativeUtterances]}
//   analysis:   {metric: recall@10, setting: RandomWords,
//                frequency_edges: [0, 1, 11, 101, 1001], importance_edges: []}

#pragma once

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "robustdr/common.hpp"
#include "robustdr/training.hpp"
#include "robustdr/typogen.hpp"

namespace robustdr {

struct MetricSpec {
  std::string name;  // mrr | recall | answer_recall
  std::size_t k = 10;

  std::string label() const { return name + "@" + std::to_string(k); }
  bool operator==(const MetricSpec&) const = default;
};

inline MetricSpec parse_metric_spec(std::string_view s) {
  const auto at = s.find('@');
  if (at == std::string_view::npos) throw ConfigError("metric '" + std::string(s) + "' lacks @k");
  MetricSpec m{std::string(s.substr(0, at)), 0};
  if (m.name != "mrr" && m.name != "recall" && m.name != "answer_recall") {
    throw ConfigError("unknown metric '" + m.name + "' (expected mrr, recall, answer_recall)");
  }
  try {
    std::size_t used = 0;
    const auto k = std::stoul(std::string(s.substr(at + 1)), &used);
    if (used != s.size() - at - 1 || k == 0) throw std::invalid_argument("k");
    m.k = k;
  } catch (const std::exception&) {
    throw ConfigError("bad cutoff in metric '" + std::string(s) + "'");
  }
  return m;
}

struct PathsConfig {
  std::string passages;
  std::string train_questions;
  std::string dev_questions;
  std::string test_questions;
  std::string qrels;
  std::string misspellings;
  std::string keyboard;
  std::string stopwords;
  std::string output;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  PathsConfig paths;
  std::size_t dim = 128;
  std::size_t vocab_size = 2048;
  std::vector<TrainMode> modes = {TrainMode::kDR, TrainMode::kDRAug, TrainMode::kDRCL,
                                  TrainMode::kDRAugCL};
  std::size_t batch_size = 48;
  std::size_t steps = 2000;
  double lr = 1e-3;
  double warmup = 0.1;
  std::optional<LossWeights> weights;
  double train_typo_p = 0.2;
  std::size_t eval_every = 0;
  std::vector<MetricSpec> metrics = {{"mrr", 10}, {"recall", 10}, {"recall", 100},
                                     {"answer_recall", 20}};
  double typo_p = 0.2;
  std::vector<TypoSetting> settings = {TypoSetting::kRandomWords, TypoSetting::kNonStopwords,
                                       TypoSetting::kDiscriminativeUtterances};
  MetricSpec analysis_metric{"recall", 10};
  TypoSetting analysis_setting = TypoSetting::kRandomWords;
  std::vector<double> frequency_edges = {0, 1, 11, 101, 1001};
  std::vector<double> importance_edges;  // empty = quartiles

  /// Largest cutoff among the metrics; the depth of every run.
  std::size_t run_depth() const {
    std::size_t k = analysis_metric.k;
    for (const auto& m : metrics) k = std::max(k, m.k);
    return k;
  }

  TrainConfig train_config(TrainMode mode) const {
    TrainConfig c;
    c.mode = mode;
    c.batch_size = batch_size;
    c.steps = steps;
    c.lr = lr;
    c.warmup = warmup;
    c.weights = weights;
    c.typo_p = train_typo_p;
    c.seed = seed;
    c.dim = dim;
    c.eval_every = eval_every;
    return c;
  }
};

namespace detail {

/// Collects field-level problems so one run reports all of them.
class ConfigReader {
 public:
  explicit ConfigReader(std::filesystem::path base) : base_(std::move(base)) {}

  template <typename T>
  std::optional<T> get(const YAML::Node& node, const std::string& field) {
    if (!node || node.IsNull()) return std::nullopt;
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      problem(field, "has the wrong type");
      return std::nullopt;
    }
  }

  template <typename T>
  void read(const YAML::Node& parent, const std::string& section, const std::string& key, T& out) {
    const auto field = section.empty() ? key : section + "." + key;
    if (!parent || !parent.IsMap()) return;
    if (auto v = get<T>(parent[key], field)) out = *v;
  }

  void read_path(const YAML::Node& paths, const std::string& key, std::string& out) {
    read(paths, "paths", key, out);
    if (!out.empty()) out = (base_ / out).lexically_normal().string();
  }

  void problem(const std::string& field, const std::string& what) {
    problems_.push_back(field + ": " + what);
  }

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::filesystem::path base_;
  std::vector<std::string> problems_;
};

}  // namespace detail

/// Parses YAML text; relative paths resolve against base_dir. Throws
/// ConfigError listing every invalid field.
inline ExperimentConfig parse_config(std::string_view text,
                                     const std::filesystem::path& base_dir = ".") {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");

  ExperimentConfig c;
  detail::ConfigReader r(base_dir);

  static const std::set<std::string> kSections = {"seed",  "paths",    "model",   "training",
                                                  "evaluation", "typos", "analysis"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!kSections.contains(key)) r.problem(key, "unknown key");
  }

  if (auto seed = r.get<std::uint64_t>(root["seed"], "seed")) {
    c.seed = *seed;
  } else if (!root["seed"]) {
    r.problem("seed", "required");
  }

  const auto paths = root["paths"];
  r.read_path(paths, "passages", c.paths.passages);
  r.read_path(paths, "train_questions", c.paths.train_questions);
  r.read_path(paths, "dev_questions", c.paths.dev_questions);
  r.read_path(paths, "test_questions", c.paths.test_questions);
  r.read_path(paths, "qrels", c.paths.qrels);
  r.read_path(paths, "misspellings", c.paths.misspellings);
  r.read_path(paths, "keyboard", c.paths.keyboard);
  r.read_path(paths, "stopwords", c.paths.stopwords);
  r.read_path(paths, "output", c.paths.output);
  if (c.paths.output.empty()) r.problem("paths.output", "required");

  const auto model = root["model"];
  r.read(model, "model", "dim", c.dim);
  r.read(model, "model", "vocab_size", c.vocab_size);
  if (c.dim < 1) r.problem("model.dim", "must be >= 1");
  if (c.vocab_size < 2) r.problem("model.vocab_size", "must be >= 2");

  const auto training = root["training"];
  if (training && training["modes"]) {
    std::vector<std::string> names;
    r.read(training, "training", "modes", names);
    c.modes.clear();
    for (const auto& n : names) {
      try {
        c.modes.push_back(parse_train_mode(n));
      } catch (const std::exception&) {
        r.problem("training.modes", "unknown mode '" + n + "'");
      }
    }
    if (c.modes.empty()) r.problem("training.modes", "must list at least one mode");
  }
  r.read(training, "training", "batch_size", c.batch_size);
  r.read(training, "training", "steps", c.steps);
  r.read(training, "training", "lr", c.lr);
  r.read(training, "training", "warmup", c.warmup);
  r.read(training, "training", "typo_p", c.train_typo_p);
  r.read(training, "training", "eval_every", c.eval_every);
  if (training && training["weights"]) {
    std::vector<double> w;
    r.read(training, "training", "weights", w);
    if (w.size() != 3) {
      r.problem("training.weights", "must list three weights [w1, w2, w3]");
    } else {
      c.weights = LossWeights{w[0], w[1], w[2]};
      try {
        check_weights(*c.weights);
      } catch (const std::exception& e) {
        r.problem("training.weights", e.what());
      }
    }
  }
  if (c.batch_size < 2) r.problem("training.batch_size", "must be >= 2");
  if (c.steps < 1) r.problem("training.steps", "must be >= 1");
  if (!(c.lr >= 0.0)) r.problem("training.lr", "must be >= 0");
  if (!(c.warmup >= 0.0 && c.warmup <= 1.0)) r.problem("training.warmup", "must be in [0, 1]");
  if (!(c.train_typo_p >= 0.0 && c.train_typo_p <= 1.0)) {
    r.problem("training.typo_p", "must be in [0, 1]");
  }

  const auto evaluation = root["evaluation"];
  if (evaluation && evaluation["metrics"]) {
    std::vector<std::string> names;
    r.read(evaluation, "evaluation", "metrics", names);
    c.metrics.clear();
    for (const auto& n : names) {
      try {
        c.metrics.push_back(parse_metric_spec(n));
      } catch (const ConfigError& e) {
        r.problem("evaluation.metrics", e.what());
      }
    }
    if (c.metrics.empty()) r.problem("evaluation.metrics", "must list at least one metric");
  }

  const auto typos = root["typos"];
  r.read(typos, "typos", "p", c.typo_p);
  if (!(c.typo_p >= 0.0 && c.typo_p <= 1.0)) r.problem("typos.p", "must be in [0, 1]");
  if (typos && typos["settings"]) {
    std::vector<std::string> names;
    r.read(typos, "typos", "settings", names);
    c.settings.clear();
    for (const auto& n : names) {
      try {
        c.settings.push_back(parse_typo_setting(n));
      } catch (const std::exception&) {
        r.problem("typos.settings", "unknown setting '" + n + "'");
      }
    }
  }

  const auto analysis = root["analysis"];
  if (analysis && analysis["metric"]) {
    std::string m;
    r.read(analysis, "analysis", "metric", m);
    try {
      c.analysis_metric = parse_metric_spec(m);
    } catch (const ConfigError& e) {
      r.problem("analysis.metric", e.what());
    }
  }
  if (analysis && analysis["setting"]) {
    std::string s;
    r.read(analysis, "analysis", "setting", s);
    try {
      c.analysis_setting = parse_typo_setting(s);
    } catch (const std::exception&) {
      r.problem("analysis.setting", "unknown setting '" + s + "'");
    }
  }
  r.read(analysis, "analysis", "frequency_edges", c.frequency_edges);
  r.read(analysis, "analysis", "importance_edges", c.importance_edges);
  auto increasing = [](const std::vector<double>& e) {
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (!(e[i] > e[i - 1])) return false;
    }
    return true;
  };
  if (c.frequency_edges.empty() || !increasing(c.frequency_edges)) {
    r.problem("analysis.frequency_edges", "must be a nonempty increasing list");
  }
  if (!increasing(c.importance_edges)) {
    r.problem("analysis.importance_edges", "must be increasing");
  }

  if (!r.problems().empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : r.problems()) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, std::filesystem::path(path).parent_path());
}

/// Checks that the named path fields are set and exist on disk. Field names
/// are the keys under `paths`.
inline void require_paths(const ExperimentConfig& c, std::initializer_list<std::string_view> fields) {
  std::vector<std::string> problems;
  for (auto f : fields) {
    const std::string* value = nullptr;
    if (f == "passages") value = &c.paths.passages;
    else if (f == "train_questions") value = &c.paths.train_questions;
    else if (f == "dev_questions") value = &c.paths.dev_questions;
    else if (f == "test_questions") value = &c.paths.test_questions;
    else if (f == "qrels") value = &c.paths.qrels;
    else throw PreconditionError("unknown path field " + std::string(f));
    if (value->empty()) {
      problems.push_back("paths." + std::string(f) + ": required");
    } else if (!std::filesystem::exists(*value)) {
      problems.push_back("paths." + std::string(f) + ": file not found: " + *value);
    }
  }
  for (auto* opt : {&c.paths.misspellings, &c.paths.keyboard, &c.paths.stopwords}) {
    if (!opt->empty() && !std::filesystem::exists(*opt)) {
      problems.push_back("paths: file not found: " + *opt);
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
}

/// Canonical JSON of the whole config, for manifests and config hashes.
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["model"] = {{"dim", c.dim}, {"vocab_size", c.vocab_size}};
  auto modes = nlohmann::json::array();
  for (auto m : c.modes) modes.push_back(std::string(to_string(m)));
  j["training"] = {{"modes", modes},       {"batch_size", c.batch_size},
                   {"steps", c.steps},     {"lr", c.lr},
                   {"warmup", c.warmup},   {"typo_p", c.train_typo_p},
                   {"eval_every", c.eval_every}};
  if (c.weights) j["training"]["weights"] = {c.weights->w1, c.weights->w2, c.weights->w3};
  auto metrics = nlohmann::json::array();
  for (const auto& m : c.metrics) metrics.push_back(m.label());
  j["evaluation"] = {{"metrics", metrics}};
  auto settings = nlohmann::json::array();
  for (auto s : c.settings) settings.push_back(std::string(to_string(s)));
  j["typos"] = {{"p", c.typo_p}, {"settings", settings}};
  j["analysis"] = {{"metric", c.analysis_metric.label()},
                   {"setting", std::string(to_string(c.analysis_setting))},
                   {"frequency_edges", c.frequency_edges},
                   {"importance_edges", c.importance_edges}};
  return j;
}

}  // namespace robustdr
