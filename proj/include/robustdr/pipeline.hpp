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

// Experiment pipeline. Each stage reads its inputs, writes artifacts under
// the output directory and records a manifest (manifests/<stage>.json) with
// the content hashes of inputs and outputs, the seed and the version. A
// stage whose manifest matches its current inputs is skipped unless forced.
//
// Output layout:
//   corpus_stats.json
//   vocab.txt
//   typos/<Setting>.tsv
//   models/<Mode>/{checkpoint.bin, train.log, index.bin}
//   runs/<Mode>/<Setting>.tsv          Original, typo settings, Removal-<Setting> (DR)
//   eval/<Mode>/<Setting>.csv, <Setting>.per_query.csv, significance.csv
//   analysis/{trend.csv, freq_bins.csv, importance_bins.csv}

#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "robustdr/analysis.hpp"
#include "robustdr/common.hpp"
#include "robustdr/config.hpp"
#include "robustdr/corpus.hpp"
#include "robustdr/encoder.hpp"
#include "robustdr/evaluation.hpp"
#include "robustdr/retrieval.hpp"
#include "robustdr/textproc.hpp"
#include "robustdr/training.hpp"
#include "robustdr/typogen.hpp"

namespace robustdr {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

inline constexpr std::string_view kOriginal = "Original";
inline constexpr std::string_view kRemovalSystem = "DR+Removal";

inline std::string removal_setting(TypoSetting s) {
  return "Removal-" + std::string(to_string(s));
}

struct Manifest {
  std::string stage;
  std::string version;
  std::uint64_t seed = 0;
  std::string params;  // SHA-256 of the stage parameters
  std::map<std::string, std::string> inputs;   // name -> SHA-256
  std::map<std::string, std::string> outputs;  // path relative to output dir -> SHA-256

  nlohmann::json to_json() const {
    return {{"stage", stage},   {"version", version}, {"seed", seed},
            {"params", params}, {"inputs", inputs},   {"outputs", outputs}};
  }

  static Manifest from_json(const nlohmann::json& j) {
    Manifest m;
    m.stage = j.at("stage").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.params = j.at("params").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    return m;
  }
};

class Pipeline {
 public:
  Pipeline(ExperimentConfig config, bool force, std::ostream& log = std::cerr)
      : cfg_(std::move(config)), force_(force), log_(log), out_(cfg_.paths.output) {}

  const ExperimentConfig& config() const { return cfg_; }
  const std::filesystem::path& output_dir() const { return out_; }

  // ---- stages -------------------------------------------------------------

  void ingest() {
    require_paths(cfg_, {"passages", "train_questions", "test_questions", "qrels"});
    std::vector<Input> inputs = raw_inputs({"passages", "train_questions", "dev_questions",
                                            "test_questions", "qrels"});
    run_stage("ingest", {}, inputs, [&]() {
      const auto& passages = this->passages();
      std::vector<DatasetSplit> splits = {{SplitName::kTrain, &train_questions()},
                                          {SplitName::kTest, &test_questions()}};
      if (has_dev()) splits.push_back({SplitName::kDev, &dev_questions()});
      check_disjoint(splits);
      ValidationReport report;
      for (const auto& s : splits) {
        auto r = validate(qrels(), passages, *s.questions, true);
        report.problems.insert(report.problems.end(), r.problems.begin(), r.problems.end());
      }
      if (!report.ok()) throw DataError(report.message());
      nlohmann::json stats = {{"passages", passages.size()},
                              {"train_questions", train_questions().size()},
                              {"dev_questions", has_dev() ? dev_questions().size() : 0},
                              {"test_questions", test_questions().size()},
                              {"judged_questions", qrels().entries().size()}};
      write_output("corpus_stats.json", stats.dump(2) + "\n");
      return std::vector<std::string>{"corpus_stats.json"};
    });
  }

  void build_vocabulary() {
    require_paths(cfg_, {"passages", "train_questions"});
    run_stage("build-vocab", {{"vocab_size", cfg_.vocab_size}},
              raw_inputs({"passages", "train_questions"}), [&]() {
                const QuestionSet* sets[] = {&train_questions()};
                const auto counts = corpus_word_counts(passages(), sets);
                vocab_ = build_vocab(counts, cfg_.vocab_size);
                write_output("vocab.txt", vocab_->to_text());
                return std::vector<std::string>{"vocab.txt"};
              });
  }

  void perturb() {
    require_paths(cfg_, {"test_questions"});
    const bool disc = std::find(cfg_.settings.begin(), cfg_.settings.end(),
                                TypoSetting::kDiscriminativeUtterances) != cfg_.settings.end();
    if (disc) require_paths(cfg_, {"qrels", "passages"});
    auto inputs = raw_inputs({"test_questions"});
    if (disc) append(inputs, raw_inputs({"passages", "qrels"}));
    append(inputs, resource_inputs());
    nlohmann::json params = {{"p", cfg_.typo_p}, {"settings", settings_json()}};
    run_stage("perturb", params, inputs, [&]() {
      std::vector<std::string> outs;
      const auto seed = derive_seed(cfg_.seed, "perturb");
      for (auto s : cfg_.settings) {
        const auto set = build_typo_testset(test_questions(), s, cfg_.typo_p, seed, typo_model(),
                                            disc ? &qrels() : nullptr,
                                            disc ? &passages() : nullptr);
        std::size_t flagged = 0;
        for (const auto& t : set) flagged += t.flagged;
        if (flagged) {
          log_ << "perturb: " << to_string(s) << ": " << flagged
               << " question(s) without an applicable typo (kept unchanged)\n";
        }
        const auto rel = typo_path(s);
        write_output(rel, format_typo_testset(set));
        outs.push_back(rel);
      }
      return outs;
    });
  }

  void train(TrainMode mode) {
    require_paths(cfg_, {"passages", "train_questions", "qrels"});
    auto inputs = raw_inputs({"passages", "train_questions", "dev_questions", "qrels"});
    inputs.push_back(artifact("vocab.txt"));
    append(inputs, resource_inputs());
    const auto tc = cfg_.train_config(mode);
    run_stage(stage_name("train", mode), train_params(mode), inputs, [&]() {
      const auto& vocab = vocabulary();
      const auto examples = make_train_examples(train_questions(), qrels(), passages(), vocab);
      DevEvaluator dev;
      std::vector<std::pair<std::string, std::string>> dev_queries;
      if (has_dev()) {
        for (const auto& q : dev_questions()) dev_queries.emplace_back(q.id, q.text);
        dev = [&](const ModelParams& m) {
          const auto index = build_index(passages(), m, vocab);
          return recall_at_k(run_queries(index, m, vocab, dev_queries, 10), qrels(), 10).mean;
        };
      }
      auto result = robustdr::train(tc, examples, vocab.size(), typo_model(), vocab, dev);
      result.params.config_hash = sha256_u64(train_params(mode).dump());
      const auto dir = "models/" + std::string(to_string(mode));
      write_output(dir + "/checkpoint.bin", serialize_checkpoint(result.params));
      write_output(dir + "/train.log", format_train_log(result.log));
      log_ << "train " << to_string(mode) << ": final loss "
           << format_double(result.log.back().loss) << "\n";
      return std::vector<std::string>{dir + "/checkpoint.bin", dir + "/train.log"};
    });
  }

  void index(TrainMode mode) {
    require_paths(cfg_, {"passages"});
    const auto dir = "models/" + std::string(to_string(mode));
    std::vector<Input> inputs = raw_inputs({"passages"});
    inputs.push_back(artifact("vocab.txt"));
    inputs.push_back(artifact(dir + "/checkpoint.bin"));
    run_stage(stage_name("index", mode), {}, inputs, [&]() {
      const auto params = deserialize_checkpoint(read_output(dir + "/checkpoint.bin"));
      write_output(dir + "/index.bin",
                   serialize_index(build_index(passages(), params, vocabulary())));
      return std::vector<std::string>{dir + "/index.bin"};
    });
  }

  void search(TrainMode mode) {
    require_paths(cfg_, {"test_questions"});
    const auto dir = "models/" + std::string(to_string(mode));
    std::vector<Input> inputs = raw_inputs({"test_questions"});
    inputs.push_back(artifact("vocab.txt"));
    inputs.push_back(artifact(dir + "/checkpoint.bin"));
    inputs.push_back(artifact(dir + "/index.bin"));
    for (auto s : cfg_.settings) inputs.push_back(artifact(typo_path(s)));
    nlohmann::json params = {{"depth", cfg_.run_depth()}, {"settings", settings_json()}};
    run_stage(stage_name("search", mode), params, inputs, [&]() {
      const auto model = deserialize_checkpoint(read_output(dir + "/checkpoint.bin"));
      const auto idx = deserialize_index(read_output(dir + "/index.bin"));
      std::vector<std::string> outs;
      auto emit = [&](const std::string& setting,
                      const std::vector<std::pair<std::string, std::string>>& queries) {
        const auto run = run_queries(idx, model, vocabulary(), queries, cfg_.run_depth());
        const auto rel = run_path(mode, setting);
        write_output(rel, format_run(run, std::string(to_string(mode)) + "/" + setting));
        outs.push_back(rel);
      };
      std::vector<std::pair<std::string, std::string>> original;
      for (const auto& q : test_questions()) original.emplace_back(q.id, q.text);
      emit(std::string(kOriginal), original);
      for (auto s : cfg_.settings) {
        const auto set = parse_typo_testset(read_output(typo_path(s)), typo_path(s));
        std::vector<std::pair<std::string, std::string>> typoed;
        for (const auto& t : set) typoed.emplace_back(t.base_question_id, t.text);
        emit(std::string(to_string(s)), typoed);
        if (mode == TrainMode::kDR) {
          std::vector<std::pair<std::string, std::string>> removed;
          for (const auto& v : removal_baseline(set, test_questions())) {
            removed.emplace_back(v.base_question_id, v.text);
          }
          emit(removal_setting(s), removed);
        }
      }
      return outs;
    });
  }

  void evaluate(TrainMode mode) {
    require_paths(cfg_, {"passages", "test_questions", "qrels"});
    std::vector<Input> inputs = raw_inputs({"passages", "test_questions", "qrels"});
    const auto settings = run_settings(mode);
    for (const auto& s : settings) inputs.push_back(artifact(run_path(mode, s)));
    const bool compare = mode != TrainMode::kDR && has_mode(TrainMode::kDR);
    if (compare) {
      for (const auto& s : run_settings(TrainMode::kDR)) {
        if (!s.starts_with("Removal-")) inputs.push_back(artifact(run_path(TrainMode::kDR, s)));
      }
    }
    nlohmann::json params = {{"metrics", metrics_json()}, {"settings", settings_json()},
                             {"compare_with_DR", compare}};
    run_stage(stage_name("evaluate", mode), params, inputs, [&]() {
      std::vector<std::string> outs;
      const auto dir = "eval/" + std::string(to_string(mode));
      std::vector<SignificanceRow> sig;
      for (const auto& s : settings) {
        const auto reports = evaluate_run(load_run_output(run_path(mode, s)));
        write_output(dir + "/" + s + ".csv", format_eval_report(reports));
        write_output(dir + "/" + s + ".per_query.csv", format_per_query(reports));
        outs.push_back(dir + "/" + s + ".csv");
        outs.push_back(dir + "/" + s + ".per_query.csv");
        if (compare && !s.starts_with("Removal-")) {
          const auto base = evaluate_run(load_run_output(run_path(TrainMode::kDR, s)));
          for (std::size_t i = 0; i < reports.size(); ++i) {
            sig.push_back({std::string(to_string(mode)) + "/" + s, "DR/" + s, reports[i].label(),
                           paired_t_test(reports[i].per_query, base[i].per_query)});
          }
        }
      }
      if (compare) {
        write_output(dir + "/significance.csv", format_significance(sig));
        outs.push_back(dir + "/significance.csv");
      }
      return outs;
    });
  }

  void analyze() {
    require_paths(cfg_, {"passages", "train_questions", "test_questions", "qrels"});
    std::vector<Input> inputs =
        raw_inputs({"passages", "train_questions", "test_questions", "qrels"});
    for (auto m : cfg_.modes) {
      for (const auto& s : run_settings(m)) inputs.push_back(artifact(run_path(m, s)));
    }
    const bool have_setting = std::find(cfg_.settings.begin(), cfg_.settings.end(),
                                        cfg_.analysis_setting) != cfg_.settings.end();
    if (have_setting) inputs.push_back(artifact(typo_path(cfg_.analysis_setting)));
    nlohmann::json params = {{"modes", modes_json()},
                             {"settings", settings_json()},
                             {"metric", cfg_.analysis_metric.label()},
                             {"setting", std::string(to_string(cfg_.analysis_setting))},
                             {"frequency_edges", cfg_.frequency_edges},
                             {"importance_edges", cfg_.importance_edges}};
    run_stage("analyze", params, inputs, [&]() {
      const auto& metric = cfg_.analysis_metric;
      auto scores_of = [&](TrainMode m, const std::string& s) {
        return evaluate_metric(load_run_output(run_path(m, s)), metric).per_query;
      };

      TrendInput trend;
      for (auto m : cfg_.modes) {
        auto& row = trend[std::string(to_string(m))];
        row[std::string(kOriginal)] = scores_of(m, std::string(kOriginal));
        for (auto s : cfg_.settings) row[std::string(to_string(s))] = scores_of(m, std::string(to_string(s)));
      }
      if (has_mode(TrainMode::kDR)) {
        // Removing nothing from a clean question leaves it unchanged.
        auto& row = trend[std::string(kRemovalSystem)];
        row[std::string(kOriginal)] = trend["DR"][std::string(kOriginal)];
        for (auto s : cfg_.settings) {
          row[std::string(to_string(s))] = scores_of(TrainMode::kDR, removal_setting(s));
        }
      }
      const auto report = trend_report(trend, metric.label());
      for (const auto& w : report.warnings) log_ << "analyze: warning: " << w << "\n";
      write_output("analysis/trend.csv", format_trend_report(report));
      std::vector<std::string> outs = {"analysis/trend.csv"};

      if (!have_setting) {
        log_ << "analyze: warning: typo setting " << to_string(cfg_.analysis_setting)
             << " not generated; skipping binned reports\n";
        return outs;
      }
      const auto s = cfg_.analysis_setting;
      const auto set = parse_typo_testset(read_output(typo_path(s)), typo_path(s));
      SystemScores systems;
      for (auto m : cfg_.modes) systems[std::string(to_string(m))] = scores_of(m, std::string(to_string(s)));
      if (has_mode(TrainMode::kDR)) {
        systems[std::string(kRemovalSystem)] = scores_of(TrainMode::kDR, removal_setting(s));
      }
      const auto freq = bin_by_frequency(set, systems, FrequencyTable::build(train_questions()),
                                         cfg_.frequency_edges);
      const auto imp = bin_by_importance(set, systems, test_questions(),
                                         IdfTable::build(passages()), cfg_.importance_edges);
      write_output("analysis/freq_bins.csv", format_binned_report(freq));
      write_output("analysis/importance_bins.csv", format_binned_report(imp));
      outs.push_back("analysis/freq_bins.csv");
      outs.push_back("analysis/importance_bins.csv");
      return outs;
    });
  }

  /// Every stage in order, for every configured mode.
  void experiment() {
    ingest();
    build_vocabulary();
    perturb();
    for (auto m : cfg_.modes) {
      train(m);
      index(m);
      search(m);
    }
    for (auto m : cfg_.modes) evaluate(m);
    analyze();
  }

  /// Stages that ran (rather than being skipped) so far.
  const std::vector<std::string>& executed() const { return executed_; }

  // ---- helpers shared with callers ----------------------------------------

  static std::string typo_path(TypoSetting s) {
    return "typos/" + std::string(to_string(s)) + ".tsv";
  }
  static std::string run_path(TrainMode m, const std::string& setting) {
    return "runs/" + std::string(to_string(m)) + "/" + setting + ".tsv";
  }
  static std::string manifest_path(const std::string& stage) {
    return "manifests/" + stage + ".json";
  }

 private:
  struct Input {
    std::string name;  // config field or output-relative path
    std::filesystem::path path;
    bool artifact = false;
  };

  static std::string stage_name(std::string_view stage, TrainMode m) {
    return std::string(stage) + "-" + std::string(to_string(m));
  }

  static void append(std::vector<Input>& a, const std::vector<Input>& b) {
    a.insert(a.end(), b.begin(), b.end());
  }

  std::vector<Input> raw_inputs(std::initializer_list<std::string_view> fields) const {
    std::vector<Input> out;
    for (auto f : fields) {
      const std::string* p = nullptr;
      if (f == "passages") p = &cfg_.paths.passages;
      else if (f == "train_questions") p = &cfg_.paths.train_questions;
      else if (f == "dev_questions") p = &cfg_.paths.dev_questions;
      else if (f == "test_questions") p = &cfg_.paths.test_questions;
      else if (f == "qrels") p = &cfg_.paths.qrels;
      if (p && !p->empty()) out.push_back({std::string(f), *p, false});
    }
    return out;
  }

  std::vector<Input> resource_inputs() const {
    std::vector<Input> out;
    if (!cfg_.paths.misspellings.empty()) out.push_back({"misspellings", cfg_.paths.misspellings, false});
    if (!cfg_.paths.keyboard.empty()) out.push_back({"keyboard", cfg_.paths.keyboard, false});
    if (!cfg_.paths.stopwords.empty()) out.push_back({"stopwords", cfg_.paths.stopwords, false});
    return out;
  }

  Input artifact(const std::string& rel) const { return {rel, out_ / rel, true}; }

  bool has_dev() const { return !cfg_.paths.dev_questions.empty(); }
  bool has_mode(TrainMode m) const {
    return std::find(cfg_.modes.begin(), cfg_.modes.end(), m) != cfg_.modes.end();
  }

  std::vector<std::string> run_settings(TrainMode m) const {
    std::vector<std::string> out = {std::string(kOriginal)};
    for (auto s : cfg_.settings) out.emplace_back(to_string(s));
    if (m == TrainMode::kDR) {
      for (auto s : cfg_.settings) out.push_back(removal_setting(s));
    }
    return out;
  }

  nlohmann::json settings_json() const {
    auto a = nlohmann::json::array();
    for (auto s : cfg_.settings) a.push_back(std::string(to_string(s)));
    return a;
  }
  nlohmann::json modes_json() const {
    auto a = nlohmann::json::array();
    for (auto m : cfg_.modes) a.push_back(std::string(to_string(m)));
    return a;
  }
  nlohmann::json metrics_json() const {
    auto a = nlohmann::json::array();
    for (const auto& m : cfg_.metrics) a.push_back(m.label());
    return a;
  }

  nlohmann::json train_params(TrainMode mode) const {
    const auto tc = cfg_.train_config(mode);
    const auto w = tc.weights.value_or(default_weights(mode));
    return {{"mode", std::string(to_string(mode))},
            {"batch_size", tc.batch_size},
            {"steps", tc.steps},
            {"lr", tc.lr},
            {"warmup", tc.warmup},
            {"weights", {w.w1, w.w2, w.w3}},
            {"typo_p", tc.typo_p},
            {"dim", tc.dim},
            {"vocab_size", cfg_.vocab_size},
            {"eval_every", tc.eval_every}};
  }

  // ---- manifests ----------------------------------------------------------

  std::optional<Manifest> load_manifest(const std::string& stage) const {
    const auto path = out_ / manifest_path(stage);
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
      return Manifest::from_json(nlohmann::json::parse(read_file(path.string())));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("corrupt manifest " + path.string() + ": " + e.what());
    }
  }

  /// The manifest that lists rel among its outputs.
  std::optional<Manifest> producer_of(const std::string& rel) const {
    const auto dir = out_ / "manifests";
    if (!std::filesystem::exists(dir)) return std::nullopt;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto m = load_manifest(f.stem().string());
      if (m && m->outputs.contains(rel)) return m;
    }
    return std::nullopt;
  }

  std::string hash_file(const std::filesystem::path& p) const {
    if (!std::filesystem::exists(p)) throw DataError("missing input " + p.string());
    return sha256_hex(read_file(p.string()));
  }

  void run_stage(const std::string& stage, const nlohmann::json& params,
                 const std::vector<Input>& inputs,
                 const std::function<std::vector<std::string>()>& body) {
    Manifest m{stage, std::string(kVersion), cfg_.seed, sha256_hex(params.dump()), {}, {}};
    for (const auto& in : inputs) {
      if (in.artifact) {
        const auto producer = producer_of(in.name);
        if (!producer) {
          throw DataError(stage + ": input " + in.name +
                          " has not been produced yet; run the stage that writes it first");
        }
        const auto h = hash_file(in.path);
        if (producer->outputs.at(in.name) != h) {
          throw DataError(stage + ": stale input " + in.name + ": content differs from what " +
                          producer->stage + " recorded; re-run " + producer->stage +
                          " with --force");
        }
        m.inputs[in.name] = h;
      } else {
        m.inputs[in.name] = hash_file(in.path);
      }
    }
    if (!force_) {
      if (auto prev = load_manifest(stage)) {
        bool same = prev->version == m.version && prev->seed == m.seed &&
                    prev->params == m.params && prev->inputs == m.inputs;
        for (const auto& [rel, h] : prev->outputs) {
          same = same && std::filesystem::exists(out_ / rel) && hash_file(out_ / rel) == h;
        }
        if (same) {
          log_ << stage << ": up to date\n";
          return;
        }
      }
    }
    log_ << stage << ": running\n";
    for (const auto& rel : body()) m.outputs[rel] = hash_file(out_ / rel);
    write_output(manifest_path(stage), m.to_json().dump(2) + "\n");
    executed_.push_back(stage);
  }

  // ---- artifacts ----------------------------------------------------------

  void write_output(const std::string& rel, std::string_view bytes) const {
    const auto path = out_ / rel;
    std::filesystem::create_directories(path.parent_path());
    write_file(path.string(), bytes);
  }

  std::string read_output(const std::string& rel) const { return read_file((out_ / rel).string()); }

  RunResult load_run_output(const std::string& rel) const {
    return parse_run(read_output(rel), (out_ / rel).string());
  }

  MetricReport evaluate_metric(const RunResult& run, const MetricSpec& spec) {
    if (spec.name == "mrr") return mrr_at_k(run, qrels(), spec.k);
    if (spec.name == "recall") return recall_at_k(run, qrels(), spec.k);
    return answer_recall_at_k(run, test_questions(), passages(), spec.k);
  }

  std::vector<MetricReport> evaluate_run(const RunResult& run) {
    std::vector<MetricReport> out;
    for (const auto& spec : cfg_.metrics) out.push_back(evaluate_metric(run, spec));
    return out;
  }

  // ---- lazily loaded inputs -----------------------------------------------

  const PassageCollection& passages() {
    if (!passages_) passages_ = load_passages(cfg_.paths.passages);
    return *passages_;
  }
  const QuestionSet& train_questions() {
    if (!train_) train_ = load_questions(cfg_.paths.train_questions);
    return *train_;
  }
  const QuestionSet& dev_questions() {
    if (!dev_) dev_ = load_questions(cfg_.paths.dev_questions);
    return *dev_;
  }
  const QuestionSet& test_questions() {
    if (!test_) test_ = load_questions(cfg_.paths.test_questions);
    return *test_;
  }
  const RelevanceJudgments& qrels() {
    if (!qrels_) qrels_ = load_qrels(cfg_.paths.qrels);
    return *qrels_;
  }
  const Vocabulary& vocabulary() {
    if (!vocab_) vocab_ = Vocabulary::from_text(read_output("vocab.txt"));
    return *vocab_;
  }
  const TypoModel& typo_model() {
    if (!typo_model_) {
      TypoModel m;
      if (!cfg_.paths.keyboard.empty()) m.keyboard = KeyboardLayout::load(cfg_.paths.keyboard);
      if (!cfg_.paths.misspellings.empty()) {
        m.misspellings = MisspellingDictionary::load(cfg_.paths.misspellings);
      }
      if (!cfg_.paths.stopwords.empty()) m.stopwords = StopwordList::from_file(cfg_.paths.stopwords);
      typo_model_ = std::move(m);
    }
    return *typo_model_;
  }

  ExperimentConfig cfg_;
  bool force_;
  std::ostream& log_;
  std::filesystem::path out_;
  std::vector<std::string> executed_;

  std::optional<PassageCollection> passages_;
  std::optional<QuestionSet> train_, dev_, test_;
  std::optional<RelevanceJudgments> qrels_;
  std::optional<Vocabulary> vocab_;
  std::optional<TypoModel> typo_model_;
};

}  // namespace robustdr
