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

// Corpus loading, text processing and typo generation.

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "robustdr/corpus.hpp"
#include "robustdr/textproc.hpp"
#include "robustdr/typogen.hpp"

namespace robustdr {
namespace {

const char kWilsonPassage[] =
    "Woodrow Wilson, a leader of the Progressive Movement, was the 28th President of the "
    "United States from 1913 to 1921. He led the country during World War I.";

std::vector<std::string> words(std::string_view s) { return word_strings(s); }

// ---------------------------------------------------------------------------
// corpus

TEST(Corpus, LoadsPassagesInFileOrder) {
  const auto p = parse_passages("p1\tfirst passage\np2\tsecond passage\n");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].id, "p1");
  EXPECT_EQ(*p.find("p2"), 1u);
}

TEST(Corpus, DuplicatePassageIdNamesTheId) {
  try {
    parse_passages("p1\ta\np1\tb\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("p1"), std::string::npos);
  }
}

TEST(Corpus, EmptyFileGivesEmptyCollection) {
  EXPECT_TRUE(parse_passages("").empty());
  EXPECT_TRUE(parse_qrels("").empty());
}

TEST(Corpus, QuestionAnswers) {
  const auto q = parse_questions("q1\twho founded rome\t[\"Romulus\"]\nq2\twhere is rome\n");
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q.at("q1").answers, std::vector<std::string>{"Romulus"});
  EXPECT_TRUE(q.at("q2").answers.empty());
}

TEST(Corpus, EmptyQuestionTextRejected) {
  EXPECT_THROW(parse_questions("q1\t\t[]\n"), DataError);
}

TEST(Corpus, QrelsGroupByQuestion) {
  const auto r = parse_qrels("q1\tp1\nq1\tp2\n");
  EXPECT_EQ(r.relevant("q1"), (std::vector<std::string>{"p1", "p2"}));
}

TEST(Corpus, ValidateReportsDanglingPassage) {
  const auto p = parse_passages("p1\ttext\n");
  const auto q = parse_questions("q1\tquestion\n");
  const auto r = parse_qrels("q1\tp9\n");
  const auto report = validate(r, p, q, true);
  ASSERT_FALSE(report.ok());
  EXPECT_NE(report.message().find("q1"), std::string::npos);
  EXPECT_NE(report.message().find("p9"), std::string::npos);
}

TEST(Corpus, TrainSplitNeedsARelevantPassage) {
  const auto p = parse_passages("p1\ttext\n");
  const auto q = parse_questions("q1\tquestion\n");
  EXPECT_FALSE(validate(RelevanceJudgments{}, p, q, true).ok());
  EXPECT_TRUE(validate(RelevanceJudgments{}, p, q, false).ok());
}

TEST(Corpus, ValidateListsEveryDanglingReference) {
  Rng rng(3);
  PassageCollection passages;
  QuestionSet questions;
  for (int i = 0; i < 30; ++i) passages.add({"p" + std::to_string(i), "text"});
  for (int i = 0; i < 20; ++i) questions.add({"q" + std::to_string(i), "text", {}});
  for (int trial = 0; trial < 50; ++trial) {
    RelevanceJudgments qrels;
    std::set<std::string> dangling;
    for (int i = 0; i < 20; ++i) {
      const auto qid = "q" + std::to_string(i);
      qrels.add(qid, "p" + std::to_string(rng.uniform_int(30)));
      if (rng.bernoulli(0.2)) {
        const auto bad = "x" + std::to_string(rng.uniform_int(1000));
        qrels.add(qid, bad);
        dangling.insert(qid + ":" + bad);
      }
    }
    const auto report = validate(qrels, passages, questions, true);
    EXPECT_EQ(report.ok(), dangling.empty());
    EXPECT_EQ(report.problems.size(), dangling.size());
  }
}

TEST(Corpus, RoundTrip) {
  PassageCollection p;
  p.add({"b", "second, with punctuation"});
  p.add({"a", "first \xc3\xa9t\xc3\xa9"});
  QuestionSet q;
  q.add({"q2", "who", {"A \"quoted\" answer", "x"}});
  q.add({"q1", "what", {}});
  RelevanceJudgments r;
  r.add("q2", "b");
  r.add("q2", "a");
  const auto p2 = parse_passages(format_passages(p));
  const auto q2 = parse_questions(format_questions(q));
  const auto r2 = parse_qrels(format_qrels(r));
  ASSERT_EQ(p2.size(), 2u);
  EXPECT_EQ(p2[0].id, "b");
  EXPECT_EQ(p2[1].text, p[1].text);
  EXPECT_EQ(q2[0].answers, q[0].answers);
  EXPECT_EQ(q2[1].id, "q1");
  EXPECT_EQ(r2.entries(), r.entries());
}

TEST(Corpus, OverlappingSplitsRejected) {
  QuestionSet a, b;
  a.add({"q1", "x", {}});
  b.add({"q1", "y", {}});
  EXPECT_THROW(check_disjoint({{SplitName::kTrain, &a}, {SplitName::kTest, &b}}), DataError);
}

// ---------------------------------------------------------------------------
// textproc

TEST(SplitWords, LowercasesAndDropsPunctuation) {
  EXPECT_EQ(words("Who was president Lincoln born?"),
            (std::vector<std::string>{"who", "was", "president", "lincoln", "born"}));
  EXPECT_TRUE(words("").empty());
  EXPECT_EQ(words("wwi?"), std::vector<std::string>{"wwi"});
}

TEST(SplitWords, ByteOffsetsPointIntoSource) {
  const std::string text = "Hi, there!";
  const auto w = split_words(text);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(text.substr(w[1].begin, w[1].end - w[1].begin), "there");
}

TEST(Vocab, SingleMergeOnRepeatedPair) {
  const std::map<std::string, std::int64_t> counts = {{"ab", 3}};
  const auto v = build_vocab(counts, base_vocab_size(counts) + 1);
  EXPECT_TRUE(v.contains("ab"));
  EXPECT_EQ(v.size(), base_vocab_size(counts) + 1);
}

TEST(Vocab, BaseSizeMeansNoMerges) {
  const std::map<std::string, std::int64_t> counts = {{"abc", 5}, {"bcd", 2}};
  const auto v = build_vocab(counts, base_vocab_size(counts));
  EXPECT_EQ(v.size(), base_vocab_size(counts));
  for (const auto& t : v.tokens()) {
    if (t == kPadToken || t == kUnkToken) continue;
    EXPECT_EQ(detail::utf8_chars(detail::strip_continuation(t)).size(), 1u) << t;
  }
}

TEST(Vocab, TiesMergeLexicographicallySmallerPairFirst) {
  // (c,d) and (a,b) both occur twice; (a,b) wins.
  const std::map<std::string, std::int64_t> counts = {{"ab", 2}, {"cd", 2}};
  const auto v = build_vocab(counts, base_vocab_size(counts) + 1);
  EXPECT_TRUE(v.contains("ab"));
  EXPECT_FALSE(v.contains("cd"));
}

TEST(Vocab, TextRoundTrip) {
  const std::map<std::string, std::int64_t> counts = {{"robust", 4}, {"ness", 2}};
  const auto v = build_vocab(counts, base_vocab_size(counts) + 6);
  const auto w = Vocabulary::from_text(v.to_text());
  EXPECT_EQ(w.tokens(), v.tokens());
}

Vocabulary robust_vocab() {
  Vocabulary v;
  for (const char* p : {"robust", "##ness", "##d", "r", "##o"}) v.add(p);
  return v;
}

std::vector<std::string> pieces(std::string_view word, const Vocabulary& v) {
  std::vector<std::string> out;
  for (auto id : tokenize(word, v)) out.push_back(v.token(id));
  return out;
}

TEST(Tokenize, GreedyLongestMatch) {
  const auto v = robust_vocab();
  EXPECT_EQ(pieces("robustness", v), (std::vector<std::string>{"robust", "##ness"}));
  EXPECT_EQ(pieces("robustnessd", v), (std::vector<std::string>{"robust", "##ness", "##d"}));
  EXPECT_EQ(pieces("robust", v), std::vector<std::string>{"robust"});
}

TEST(Tokenize, UnmatchableWordIsOneUnk) {
  const auto v = robust_vocab();
  EXPECT_EQ(tokenize("zzz", v), std::vector<TokenId>{Vocabulary::kUnk});
}

TEST(Tokenize, TotalAndConsistentOverCorpusAlphabet) {
  const auto passages = parse_passages(std::string("p1\t") + kWilsonPassage + "\n");
  const QuestionSet* none[] = {nullptr};
  const auto counts = corpus_word_counts(passages, std::span<const QuestionSet* const>(none, 0));
  const auto v = build_vocab(counts, base_vocab_size(counts) + 40);
  Rng rng(11);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  for (int trial = 0; trial < 500; ++trial) {
    std::string w;
    const auto len = 1 + rng.uniform_int(12);
    for (std::size_t i = 0; i < len; ++i) w.push_back(alphabet[rng.uniform_int(alphabet.size())]);
    const auto ids = tokenize(w, v);
    ASSERT_FALSE(ids.empty());
    EXPECT_EQ(ids, tokenize(w, v));
    std::string joined;
    for (auto id : ids) {
      const auto& t = v.token(id);
      joined += t.rfind("##", 0) == 0 ? t.substr(2) : t;
    }
    EXPECT_EQ(joined, w);
  }
}

TEST(Idf, SmoothedFormula) {
  IdfTable t;
  t.set(9, {{"every", 9}, {"some", 4}});
  EXPECT_DOUBLE_EQ(idf("every", t), 0.0);
  EXPECT_NEAR(idf("never", t), 2.302585092994046, 1e-12);
  EXPECT_NEAR(idf("some", t), 0.6931471805599453, 1e-12);
}

TEST(Idf, DecreasesWithDocumentFrequency) {
  IdfTable t;
  std::unordered_map<std::string, std::size_t> df;
  for (std::size_t i = 0; i <= 50; ++i) df["w" + std::to_string(i)] = i;
  t.set(50, df);
  for (std::size_t i = 1; i <= 50; ++i) {
    EXPECT_GT(idf("w" + std::to_string(i - 1), t), idf("w" + std::to_string(i), t));
  }
}

TEST(RelativeImportance, Examples) {
  IdfTable t;
  t.set(9, {{"a", 4}, {"b", 4}, {"c", 4}, {"d", 4}});
  const std::vector<std::string> one = {"x"};
  EXPECT_DOUBLE_EQ(relative_importance("x", one, t), 1.0);
  const std::vector<std::string> four = {"a", "b", "c", "d"};
  for (const auto& w : four) EXPECT_DOUBLE_EQ(relative_importance(w, four, t), 0.25);

  // N = 3: df 0 gives ln 4 = 2 ln 2, df 1 gives ln 2.
  IdfTable u;
  u.set(3, {{"y", 1}, {"z", 1}});
  const std::vector<std::string> three = {"x", "y", "z"};
  EXPECT_NEAR(relative_importance("x", three, u), 0.5, 1e-15);
}

TEST(RelativeImportance, SumsToOne) {
  const auto passages = parse_passages(
      "p1\tthe cat sat\np2\tthe dog ran\np3\ta cat ran far\np4\tthe end\n");
  const auto t = IdfTable::build(passages);
  const std::vector<std::string> q = {"the", "cat", "ran", "home"};
  double total = 0.0;
  for (const auto& w : q) total += relative_importance(w, q, t);
  EXPECT_NEAR(total, 1.0, 1e-12);
  const auto all = relative_importances(q, t);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_DOUBLE_EQ(all[i], relative_importance(q[i], q, t));
  }
}

TEST(Stopwords, Membership) {
  EXPECT_TRUE(is_stopword("the"));
  EXPECT_FALSE(is_stopword("president"));
  EXPECT_TRUE(is_stopword(words("WaS")[0]));
}

TEST(Stopwords, ShippedFileMatchesBuiltin) {
  const auto file = StopwordList::from_file(std::string(ROBUSTDR_DATA_DIR) + "/stopwords.txt");
  EXPECT_TRUE(file.contains("the"));
  EXPECT_EQ(read_file(std::string(ROBUSTDR_DATA_DIR) + "/stopwords.txt"),
            std::string(kDefaultStopwords));
}

// ---------------------------------------------------------------------------
// typogen

const TypoModel& model() {
  static const TypoModel m;
  return m;
}

TEST(PerturbWord, SwapCanProduceTransposition) {
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 400; ++s) {
    Rng rng(s);
    seen.insert(*perturb_word("committee", TypoKind::kRandomSwap, rng, model()));
  }
  EXPECT_TRUE(seen.contains("comimttee"));
  EXPECT_FALSE(seen.contains("committee"));
}

TEST(PerturbWord, KeyboardCanHitAdjacentKey) {
  std::set<std::string> seen;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    Rng rng(s);
    seen.insert(*perturb_word("committee", TypoKind::kKeyboard, rng, model()));
  }
  EXPECT_TRUE(seen.contains("comnittee"));
}

TEST(PerturbWord, MisspellingFromDictionary) {
  Rng rng(1);
  EXPECT_EQ(perturb_word("committee", TypoKind::kMisspelling, rng, model()), "comittee");
  EXPECT_EQ(perturb_word("zebra", TypoKind::kMisspelling, rng, model()), std::nullopt);
}

TEST(PerturbWord, SingleLettersSurviveDestructiveEdits) {
  Rng rng(2);
  for (auto k : {TypoKind::kRandomDelete, TypoKind::kRandomSwap, TypoKind::kRandomSubstitute,
                 TypoKind::kKeyboard}) {
    EXPECT_EQ(perturb_word("a", k, rng, model()), std::nullopt);
  }
  EXPECT_NE(perturb_word("a", TypoKind::kRandomInsert, rng, model()), std::nullopt);
}

TEST(PerturbWord, EditInvariants) {
  const auto& kb = model().keyboard;
  const std::vector<std::string> vocab = {"committee", "president", "states", "aa", "hello",
                                          "ab", "wilson", "movement", "zzzz", "q1"};
  Rng rng(5);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto& w = vocab[rng.uniform_int(vocab.size())];
    const auto kind = kAllTypoKinds[rng.uniform_int(kAllTypoKinds.size())];
    const auto out = perturb_word(w, kind, rng, model());
    if (!out) continue;
    EXPECT_NE(*out, w);
    switch (kind) {
      case TypoKind::kRandomInsert: EXPECT_EQ(out->size(), w.size() + 1); break;
      case TypoKind::kRandomDelete: EXPECT_EQ(out->size() + 1, w.size()); break;
      case TypoKind::kRandomSwap:
      case TypoKind::kRandomSubstitute: EXPECT_EQ(out->size(), w.size()); break;
      case TypoKind::kKeyboard: {
        ASSERT_EQ(out->size(), w.size());
        std::size_t diffs = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          if ((*out)[i] == w[i]) continue;
          ++diffs;
          EXPECT_NE(kb.neighbours(w[i]).find((*out)[i]), std::string::npos);
        }
        EXPECT_EQ(diffs, 1u);
        break;
      }
      case TypoKind::kMisspelling: break;
    }
  }
}

TEST(Keyboard, AdjacencyIsSymmetricAndLettersOnly) {
  const auto kb = KeyboardLayout::qwerty();
  for (char c = 'a'; c <= 'z'; ++c) {
    const auto ns = kb.neighbours(c);
    EXPECT_FALSE(ns.empty()) << c;
    for (char n : ns) {
      EXPECT_TRUE(n >= 'a' && n <= 'z');
      EXPECT_NE(kb.neighbours(n).find(c), std::string::npos) << c << n;
    }
  }
  EXPECT_NE(kb.neighbours('m').find('n'), std::string::npos);
}

TEST(Keyboard, ShippedFilesMatchBuiltins) {
  const std::string dir = ROBUSTDR_DATA_DIR;
  EXPECT_EQ(read_file(dir + "/keyboard_adjacency.tsv"), KeyboardLayout::qwerty().to_text());
  EXPECT_EQ(read_file(dir + "/misspellings.tsv"), MisspellingDictionary::builtin().to_text());
}

TEST(Eligibility, Settings) {
  const std::vector<std::string> five = {"a", "b", "c", "d", "e"};
  EXPECT_EQ(eligible_indices(five, TypoSetting::kRandomWords),
            (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  const std::vector<std::string> q = {"who", "was", "president"};
  EXPECT_EQ(eligible_indices(q, TypoSetting::kNonStopwords), std::vector<std::size_t>{2});
  EXPECT_THROW(eligible_indices(q, TypoSetting::kDiscriminativeUtterances), PreconditionError);
}

TEST(Discriminative, SharedPhraseWithWilsonPassage) {
  const auto q = words("Who was the president of the united states during wwi?");
  const auto p = words(kWilsonPassage);
  const auto spans = discriminative_utterances(q, p);
  ASSERT_EQ(spans.size(), 1u);
  std::vector<std::string> marked(q.begin() + static_cast<std::ptrdiff_t>(spans[0].first),
                                  q.begin() + static_cast<std::ptrdiff_t>(spans[0].second));
  EXPECT_EQ(join_words(marked), "president of the united states");
  const std::vector<std::vector<std::string>> rel = {p};
  EXPECT_EQ(eligible_indices(q, TypoSetting::kDiscriminativeUtterances, rel),
            (std::vector<std::size_t>{3, 4, 5, 6, 7}));
}

TEST(Discriminative, NoSharedBigram) {
  EXPECT_TRUE(discriminative_utterances(words("red green blue"), words("green red blue")).empty());
}

TEST(Discriminative, ContainedQuestionIsOneSpan) {
  const auto q = words("leader of the progressive movement");
  const auto spans = discriminative_utterances(q, words(kWilsonPassage));
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0], (WordSpan{0, q.size()}));
}

TEST(Discriminative, StopwordOnlySpansSkipped) {
  EXPECT_TRUE(discriminative_utterances(words("what of the thing"), words("one of the others"))
                  .empty());
}

Question question(std::string text) { return {"q", std::move(text), {}}; }

TEST(PerturbQuestion, ZeroProbabilityIsIdentity) {
  Rng rng(4);
  const auto q = question("Who was the president of the united states?");
  const auto t = perturb_question(q, TypoSetting::kRandomWords, {0.0, true}, rng, model());
  EXPECT_EQ(t.text, q.text);
  EXPECT_TRUE(t.edits.empty());
  EXPECT_TRUE(t.flagged);
}

TEST(PerturbQuestion, UnitProbabilityEditsEveryEligibleWord) {
  Rng rng(4);
  const auto q = question("president committee states movement leader");
  const auto t = perturb_question(q, TypoSetting::kRandomWords, {1.0, false}, rng, model());
  ASSERT_EQ(t.edits.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(t.edits[i].word_index, i);
  const auto w = words(t.text);
  for (const auto& e : t.edits) EXPECT_EQ(w[e.word_index], e.typoed);
}

TEST(PerturbQuestion, EditRateNearP) {
  Rng rng(99);
  std::size_t eligible = 0, edited = 0;
  const auto q = question("alpha bravo charlie delta echo foxtrot golf hotel india juliet");
  while (eligible < 10000) {
    const auto t = perturb_question(q, TypoSetting::kRandomWords, {0.2, false}, rng, model());
    eligible += 10;
    edited += t.edits.size();
  }
  const double rate = static_cast<double>(edited) / static_cast<double>(eligible);
  EXPECT_GE(rate, 0.18);
  EXPECT_LE(rate, 0.22);
}

TEST(PerturbQuestion, EnsureEditGivesAtLeastOne) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const auto t = perturb_question(question("cat sat"), TypoSetting::kRandomWords, {0.01, true},
                                    rng, model());
    EXPECT_EQ(t.edits.size(), 1u);
  }
}

TEST(TypoTestset, StopwordOnlyQuestionFlagged) {
  QuestionSet qs;
  qs.add({"q1", "who was it", {}});
  const auto set = build_typo_testset(qs, TypoSetting::kNonStopwords, 0.5, 1, model());
  ASSERT_EQ(set.size(), 1u);
  EXPECT_TRUE(set[0].flagged);
  EXPECT_EQ(set[0].text, "who was it");
}

TEST(TypoTestset, DeterministicAndOrderIndependent) {
  QuestionSet a, b;
  const std::vector<std::pair<std::string, std::string>> qs = {
      {"q1", "who was the president of the united states"},
      {"q2", "where was lincoln born"},
      {"q3", "what is the committee for"}};
  for (const auto& [id, text] : qs) a.add({id, text, {}});
  for (auto it = qs.rbegin(); it != qs.rend(); ++it) b.add({it->first, it->second, {}});
  const auto x = format_typo_testset(build_typo_testset(a, TypoSetting::kRandomWords, 0.3, 8, model()));
  const auto y = format_typo_testset(build_typo_testset(a, TypoSetting::kRandomWords, 0.3, 8, model()));
  EXPECT_EQ(x, y);
  auto xb = build_typo_testset(b, TypoSetting::kRandomWords, 0.3, 8, model());
  std::reverse(xb.begin(), xb.end());
  EXPECT_EQ(format_typo_testset(xb), x);
}

TEST(TypoTestset, SettingOnlyMasksTheCoinStream) {
  // Without the fallback edit, positions edited under NonStopwords must be
  // exactly the non-stopword positions edited under RandomWords.
  const auto q = question("who was the president of the united states during the war");
  const auto w = words(q.text);
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng r1(s), r2(s);
    const auto all = perturb_question(q, TypoSetting::kRandomWords, {0.4, false}, r1, model());
    const auto ns = perturb_question(q, TypoSetting::kNonStopwords, {0.4, false}, r2, model());
    std::vector<TypoEdit> expected;
    for (const auto& e : all.edits) {
      if (!is_stopword(w[e.word_index])) expected.push_back(e);
    }
    EXPECT_EQ(ns.edits, expected);
  }
}

TEST(TypoTestset, FileRoundTrip) {
  QuestionSet qs;
  qs.add({"q1", "Where was President Lincoln born?", {}});
  qs.add({"q2", "the of", {}});
  const auto set = build_typo_testset(qs, TypoSetting::kNonStopwords, 0.5, 3, model());
  EXPECT_EQ(parse_typo_testset(format_typo_testset(set)), set);
}

TEST(TypoTestset, DiscriminativeNeedsJudgments) {
  QuestionSet qs;
  qs.add({"q1", "x y", {}});
  EXPECT_THROW(build_typo_testset(qs, TypoSetting::kDiscriminativeUtterances, 0.2, 1, model()),
               PreconditionError);
}

}  // namespace
}  // namespace robustdr
