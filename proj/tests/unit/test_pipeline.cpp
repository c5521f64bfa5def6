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

// Analysis reports, config parsing, the synthetic generator, and the staged
// pipeline driven in-process and through the CLI.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "robustdr/analysis.hpp"
#include "robustdr/config.hpp"
#include "robustdr/pipeline.hpp"
#include "robustdr/synthetic.hpp"

namespace robustdr {
namespace {

namespace fs = std::filesystem;

QuestionSet questions(std::initializer_list<std::pair<const char*, const char*>> qs) {
  QuestionSet out;
  for (const auto& [id, text] : qs) out.add({id, text, {}});
  return out;
}

TypoedQuestion edited(const std::string& qid, std::vector<std::pair<std::size_t, std::string>> at) {
  TypoedQuestion t{qid, "", {}, false};
  for (auto& [i, w] : at) t.edits.push_back({i, w, w + "x", TypoKind::kRandomInsert});
  return t;
}

// ---------------------------------------------------------------------------
// frequency

TEST(Frequency, CountsTokensNotQuestions) {
  const auto train = questions({{"a", "who was obama"}, {"b", "obama obama here"}});
  const auto t = FrequencyTable::build(train);
  EXPECT_EQ(train_frequency("obama", t), 3);
  EXPECT_EQ(train_frequency("who", t), 1);
  EXPECT_EQ(train_frequency("zebra", t), 0);
}

TEST(Frequency, BinsUseMinimumOverEditedWords) {
  const auto train = questions({{"t1", "rare common common common common common common common common "
                                       "common common common"}});
  const auto table = FrequencyTable::build(train);
  TypoedQuestionSet set = {edited("q1", {{0, "common"}}), edited("q2", {{0, "common"}, {1, "rare"}}),
                           edited("q3", {{0, "unseen"}}), TypoedQuestion{"q4", "", {}, true}};
  SystemScores s = {{"DR", {{"q1", 1.0}, {"q2", 0.0}, {"q3", 0.5}, {"q4", 1.0}}}};
  const auto r = bin_by_frequency(set, s, table);
  ASSERT_EQ(r.bins.size(), 5u);
  EXPECT_EQ(r.bins[0].question_ids, std::vector<std::string>{"q3"});
  EXPECT_EQ(r.bins[1].question_ids, std::vector<std::string>{"q2"});
  EXPECT_EQ(r.bins[2].question_ids, std::vector<std::string>{"q1"});  // 11 occurrences
  EXPECT_EQ(r.bins[2].mean.at("DR"), 1.0);
  EXPECT_EQ(r.flagged, std::vector<std::string>{"q4"});
  EXPECT_EQ(r.total() + r.flagged.size(), set.size());
}

TEST(Frequency, EdgeBoundaries) {
  const std::vector<double> e = {0, 1, 11, 101, 1001};
  EXPECT_EQ(detail::bin_of(0, e), 0u);
  EXPECT_EQ(detail::bin_of(1, e), 1u);
  EXPECT_EQ(detail::bin_of(10, e), 1u);
  EXPECT_EQ(detail::bin_of(11, e), 2u);
  EXPECT_EQ(detail::bin_of(1000, e), 3u);
  EXPECT_EQ(detail::bin_of(1e9, e), 4u);
}

TEST(Frequency, MissingScoreRejected) {
  const FrequencyTable table;
  TypoedQuestionSet set = {edited("q1", {{0, "a"}})};
  SystemScores s = {{"DR", {}}};
  EXPECT_THROW(bin_by_frequency(set, s, table), PreconditionError);
}

// ---------------------------------------------------------------------------
// importance

TEST(Importance, BinsEveryEditedQuestion) {
  PassageCollection passages;
  passages.add({"p1", "apple banana"});
  passages.add({"p2", "apple cherry"});
  passages.add({"p3", "apple date"});
  const auto idf = IdfTable::build(passages);
  const auto qs = questions({{"q1", "apple banana"}, {"q2", "apple cherry"}, {"q3", "apple"}});
  TypoedQuestionSet set = {edited("q1", {{1, "banana"}}), edited("q2", {{0, "apple"}}),
                           edited("q3", {{0, "apple"}})};
  SystemScores s = {{"A", {{"q1", 0.0}, {"q2", 1.0}, {"q3", 1.0}}}};
  const auto r = bin_by_importance(set, s, qs, idf, {0.0, 0.5});
  EXPECT_EQ(r.total(), 3u);
  // apple carries no idf; a question made only of zero-idf words spreads
  // importance uniformly, so q3's single word gets 1.
  EXPECT_EQ(r.bins[0].question_ids, std::vector<std::string>{"q2"});
  EXPECT_EQ(r.bins[1].question_ids, (std::vector<std::string>{"q1", "q3"}));
  EXPECT_EQ(r.bins[1].mean.at("A"), 0.5);
}

TEST(Importance, QuartileEdges) {
  EXPECT_EQ(quantile({1, 2, 3, 4, 5}, 0.5), 3.0);
  EXPECT_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_THROW(quantile({}, 0.5), PreconditionError);
}

// ---------------------------------------------------------------------------
// removal

TEST(Removal, DropsTypoedPositions) {
  const auto qs = questions({{"q", "where was president born"}});
  const auto v = removal_baseline({edited("q", {{2, "president"}})}, qs);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].text, "where was born");
  EXPECT_FALSE(v[0].flagged);
}

TEST(Removal, AllWordsRemovedIsFlagged) {
  const auto qs = questions({{"q", "obama born"}, {"r", "kept as is"}});
  const auto v = removal_baseline({edited("q", {{0, "obama"}, {1, "born"}}), TypoedQuestion{"r", "", {}, true}},
                                  qs);
  EXPECT_TRUE(v[0].flagged);
  EXPECT_EQ(v[0].text, "");
  EXPECT_EQ(v[1].text, "kept as is");
  EXPECT_FALSE(v[1].flagged);
}

// ---------------------------------------------------------------------------
// trend

TEST(Trend, DeltasAgainstOriginal) {
  TrendInput in;
  in["DR"]["Original"] = {{"a", 1.0}, {"b", 1.0}, {"c", 0.0}};
  in["DR"]["RandomWords"] = {{"a", 1.0}, {"b", 0.0}, {"c", 0.0}};
  const auto r = trend_report(in, "recall@10");
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].setting, "Original");
  EXPECT_FALSE(r.rows[0].test.has_value());
  EXPECT_NEAR(r.rows[1].delta, -1.0 / 3.0, 1e-15);
  ASSERT_TRUE(r.rows[1].test.has_value());
  EXPECT_LT(r.rows[1].test->t, 0.0);
  ASSERT_EQ(r.warnings.size(), 2u);
  EXPECT_NE(r.warnings[0].find("NonStopwords"), std::string::npos);
}

TEST(Trend, MissingOriginalWarns) {
  TrendInput in;
  in["X"]["RandomWords"] = {{"a", 1.0}};
  const auto r = trend_report(in, "mrr@10");
  EXPECT_NE(r.warnings.front().find("missing setting Original"), std::string::npos);
  EXPECT_EQ(r.rows.at(0).delta, 0.0);
}

// ---------------------------------------------------------------------------
// config

constexpr const char* kMinimalConfig = R"(seed: 3
paths:
  passages: data/passages.tsv
  output: out
)";

TEST(Config, DefaultsAndRelativePaths) {
  const auto c = parse_config(kMinimalConfig, "/base");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.paths.passages, "/base/data/passages.tsv");
  EXPECT_EQ(c.paths.output, "/base/out");
  EXPECT_EQ(c.batch_size, 48u);
  EXPECT_EQ(c.modes.size(), 4u);
  EXPECT_EQ(c.run_depth(), 100u);
  EXPECT_EQ(c.train_config(TrainMode::kDRCL).mode, TrainMode::kDRCL);
}

TEST(Config, ReportsEveryBadField) {
  const std::string text = R"(seed: 3
paths: {output: out}
training: {batch_size: 1, modes: [DR, Foo], lr: -1}
typos: {p: 1.5, settings: [bogus]}
colour: red
)";
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* f : {"training.batch_size", "training.modes", "training.lr", "typos.p",
                          "typos.settings", "colour: unknown key"}) {
      EXPECT_NE(msg.find(f), std::string::npos) << f << " missing from\n" << msg;
    }
  }
}

TEST(Config, SeedAndOutputRequired) {
  try {
    parse_config("paths: {passages: x}\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("seed: required"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("paths.output: required"), std::string::npos);
  }
}

TEST(Config, MetricSpecs) {
  EXPECT_EQ(parse_metric_spec("answer_recall@20").name, "answer_recall");
  EXPECT_EQ(parse_metric_spec("mrr@10").label(), "mrr@10");
  EXPECT_THROW(parse_metric_spec("ndcg@10"), ConfigError);
  EXPECT_THROW(parse_metric_spec("recall@0"), ConfigError);
  EXPECT_THROW(parse_metric_spec("recall"), ConfigError);
}

TEST(Config, RequirePathsNamesField) {
  const auto c = parse_config(kMinimalConfig, "/nonexistent");
  try {
    require_paths(c, {"qrels", "passages"});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("paths.qrels: required"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("paths.passages: file not found"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// synthetic data

SyntheticConfig tiny_synthetic() {
  SyntheticConfig s;
  s.seed = 11;
  s.first_names = 8;
  s.surnames = 8;
  s.cities = 30;
  s.spouses = 30;
  s.subjects = 10;
  s.train_questions = 40;
  s.dev_questions = 8;
  s.test_questions = 16;
  return s;
}

TEST(Synthetic, DeterministicAndConsistent) {
  const auto a = generate_synthetic(tiny_synthetic());
  const auto b = generate_synthetic(tiny_synthetic());
  EXPECT_EQ(a.passages.size(), 64u);
  EXPECT_EQ(a.train.size(), 40u);
  EXPECT_EQ(a.dev.size(), 8u);
  EXPECT_EQ(a.test.size(), 16u);
  std::ostringstream sa, sb;
  for (const auto& q : a.test) sa << q.id << q.text << "\n";
  for (const auto& q : b.test) sb << q.id << q.text << "\n";
  EXPECT_EQ(sa.str(), sb.str());
  for (const auto* set : {&a.train, &a.dev, &a.test}) {
    for (const auto& q : *set) {
      const auto& rel = a.qrels.relevant(q.id);
      ASSERT_EQ(rel.size(), 1u);
      ASSERT_EQ(q.answers.size(), 1u);
      EXPECT_TRUE(contains_answer(a.passages.at(rel.front()).text, q.answers.front())) << q.id;
    }
  }
  auto other = tiny_synthetic();
  other.seed = 12;
  EXPECT_NE(generate_synthetic(other).test.begin()->text + generate_synthetic(other).passages.begin()->text,
            a.test.begin()->text + a.passages.begin()->text);
}

TEST(Synthetic, TooManyQuestionsRejected) {
  auto s = tiny_synthetic();
  s.train_questions = 100;
  EXPECT_THROW(generate_synthetic(s), PreconditionError);
}

// ---------------------------------------------------------------------------
// pipeline

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("robustdr_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_ / "data");
    const auto ds = generate_synthetic(tiny_synthetic());
    write_passages((dir_ / "data/passages.tsv").string(), ds.passages);
    write_questions((dir_ / "data/train.tsv").string(), ds.train);
    write_questions((dir_ / "data/dev.tsv").string(), ds.dev);
    write_questions((dir_ / "data/test.tsv").string(), ds.test);
    write_qrels((dir_ / "data/qrels.tsv").string(), ds.qrels);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config_text(bool with_qrels = true) const {
    std::string s = R"(seed: 4
paths:
  passages: data/passages.tsv
  train_questions: data/train.tsv
  dev_questions: data/dev.tsv
  test_questions: data/test.tsv
)";
    if (with_qrels) s += "  qrels: data/qrels.tsv\n";
    s += R"(  output: out
model: {dim: 8, vocab_size: 300}
training: {modes: [DR, DR_Aug_CL], batch_size: 4, steps: 15, lr: 0.01}
evaluation: {metrics: [mrr@10, recall@10]}
)";
    return s;
  }

  fs::path write_config(bool with_qrels = true) const {
    const auto p = dir_ / "exp.yaml";
    std::ofstream(p) << config_text(with_qrels);
    return p;
  }

  std::map<std::string, std::string> output_hashes() const {
    std::map<std::string, std::string> h;
    for (const auto& e : fs::recursive_directory_iterator(dir_ / "out")) {
      if (e.is_regular_file()) {
        h[fs::relative(e.path(), dir_ / "out").string()] = sha256_hex(read_file(e.path().string()));
      }
    }
    return h;
  }

  fs::path dir_;
  std::ostringstream log_;
};

TEST_F(PipelineTest, FullRunThenNoOp) {
  const auto cfg = load_config(write_config().string());
  Pipeline first(cfg, false, log_);
  first.experiment();
  EXPECT_EQ(first.executed().size(), 3u + 4u * 2u + 1u);
  for (const char* rel : {"corpus_stats.json", "vocab.txt", "typos/RandomWords.tsv",
                          "models/DR/checkpoint.bin", "runs/DR/Original.tsv",
                          "runs/DR/Removal-RandomWords.tsv", "runs/DR_Aug_CL/NonStopwords.tsv",
                          "eval/DR/Original.csv", "eval/DR_Aug_CL/significance.csv",
                          "analysis/trend.csv", "analysis/freq_bins.csv",
                          "analysis/importance_bins.csv", "manifests/train-DR.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / rel)) << rel;
  }
  const auto before = output_hashes();

  Pipeline second(cfg, false, log_);
  second.experiment();
  EXPECT_TRUE(second.executed().empty());
  EXPECT_EQ(output_hashes(), before);

  Pipeline forced(cfg, true, log_);
  forced.experiment();
  EXPECT_EQ(forced.executed().size(), first.executed().size());
  EXPECT_EQ(output_hashes(), before);
}

TEST_F(PipelineTest, ChangedParamsRerunStage) {
  auto cfg = load_config(write_config().string());
  cfg.modes = {TrainMode::kDR};
  Pipeline(cfg, false, log_).experiment();
  cfg.typo_p = 0.4;
  Pipeline p(cfg, false, log_);
  p.ingest();
  p.build_vocabulary();
  p.perturb();
  EXPECT_EQ(p.executed(), std::vector<std::string>{"perturb"});
}

TEST_F(PipelineTest, StaleInputDetected) {
  auto cfg = load_config(write_config().string());
  cfg.modes = {TrainMode::kDR};
  Pipeline(cfg, false, log_).experiment();
  std::ofstream(dir_ / "out" / Pipeline::typo_path(TypoSetting::kRandomWords), std::ios::app)
      << "tampered\tline\n";
  Pipeline p(cfg, true, log_);
  EXPECT_THROW(p.search(TrainMode::kDR), DataError);
}

TEST_F(PipelineTest, MissingUpstreamArtifact) {
  const auto cfg = load_config(write_config().string());
  Pipeline p(cfg, false, log_);
  EXPECT_THROW(p.index(TrainMode::kDR), DataError);
}

int run_cli(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(ROBUSTDR_CLI) + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(PipelineTest, CliExitCodes) {
  const auto err = dir_ / "stderr.txt";
  const auto bare = write_config(false);
  EXPECT_EQ(run_cli("perturb --config " + bare.string() + " --setting discriminative", err), 1);
  EXPECT_NE(read_file(err.string()).find("paths.qrels"), std::string::npos);

  EXPECT_EQ(run_cli("perturb --config " + bare.string() + " --setting random", err), 0);
  EXPECT_EQ(run_cli("train --config " + bare.string(), err), 1);
  EXPECT_EQ(run_cli("bogus-stage", err), 1);
  EXPECT_EQ(run_cli("ingest", err), 1);
  EXPECT_EQ(run_cli("ingest --config " + (dir_ / "absent.yaml").string(), err), 1);

  const auto cfg = write_config(true);
  std::ofstream(dir_ / "data/qrels.tsv", std::ios::app) << "test0000\tmissing-passage\n";
  EXPECT_EQ(run_cli("ingest --config " + cfg.string(), err), 2);
  EXPECT_NE(read_file(err.string()).find("missing-passage"), std::string::npos);
}

TEST_F(PipelineTest, CliOverridesOutputAndSeed) {
  const auto cfg = write_config();
  const auto err = dir_ / "stderr.txt";
  const auto out_a = dir_ / "a";
  const auto out_b = dir_ / "b";
  EXPECT_EQ(run_cli("perturb --config " + cfg.string() + " --output " + out_a.string(), err), 0);
  EXPECT_EQ(run_cli("perturb --config " + cfg.string() + " --output " + out_b.string() + " --seed 99",
                    err),
            0);
  const auto rel = Pipeline::typo_path(TypoSetting::kRandomWords);
  EXPECT_NE(read_file((out_a / rel).string()), read_file((out_b / rel).string()));
  EXPECT_EQ(run_cli("perturb --config " + cfg.string() + " --typo-p 2", err), 1);
}

}  // namespace
}  // namespace robustdr
