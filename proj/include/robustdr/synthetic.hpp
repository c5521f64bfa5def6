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

// Synthetic biography corpus for desk-scale experiments.
//
// People carry two-word pseudo-word names built from a shared syllable
// inventory, laid out on a first-name x surname grid: every first name and
// every surname is shared by many people, so only the pair identifies a
// person. Each person has one biography passage covering every relation
// (birth, marriage, study, work, death); a question asks about one relation
// of one person. Training questions cover distinct people; dev and test
// questions ask about a different relation of people seen in training.

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "robustdr/common.hpp"
#include "robustdr/corpus.hpp"
#include "robustdr/textproc.hpp"

namespace robustdr {

struct SyntheticConfig {
  std::uint64_t seed = 7;
  std::size_t first_names = 40;
  std::size_t surnames = 50;
  std::size_t cities = 300;
  std::size_t spouses = 400;
  std::size_t subjects = 100;
  std::size_t train_questions = 500;
  std::size_t dev_questions = 100;
  std::size_t test_questions = 200;
};

struct SyntheticDataset {
  PassageCollection passages;
  QuestionSet train;
  QuestionSet dev;
  QuestionSet test;
  RelevanceJudgments qrels;
};

namespace detail {

inline constexpr std::array<std::string_view, 16> kOnsets = {
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st"};
inline constexpr std::array<std::string_view, 5> kVowels = {"a", "e", "i", "o", "u"};
inline constexpr std::array<std::string_view, 6> kCodas = {"", "", "n", "r", "l", "s"};

/// Distinct pseudo-words of the given syllable counts, avoiding `taken`.
inline std::vector<std::string> pseudo_words(std::size_t n, std::size_t min_syl,
                                             std::size_t max_syl, Rng& rng,
                                             std::set<std::string>& taken) {
  std::vector<std::string> out;
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 1000000) throw PreconditionError("pseudo-word inventory exhausted");
    const auto syl = min_syl + rng.uniform_int(max_syl - min_syl + 1);
    std::string w;
    for (std::size_t s = 0; s < syl; ++s) {
      w += kOnsets[rng.uniform_int(kOnsets.size())];
      w += kVowels[rng.uniform_int(kVowels.size())];
      w += kCodas[rng.uniform_int(kCodas.size())];
    }
    if (w.size() < 4 || is_stopword(w) || !taken.insert(w).second) continue;
    out.push_back(std::move(w));
  }
  return out;
}

struct Relation {
  std::string_view question;  // "{N}" marks the name
  std::string_view answer;    // slot answering the question
};

inline constexpr std::array<Relation, 5> kRelations = {{
    {"where was {N} born", "{C1}"},
    {"who had {N} married", "{S}"},
    {"what had {N} studied", "{U}"},
    {"where had {N} worked", "{C2}"},
    {"when had {N} died", "{Y2}"},
}};

// Every question word other than the name occurs in every biography.
inline constexpr std::string_view kBiography =
    "{N} was born in {C1} in {Y1} , when the town was small . {N} , who had studied {U} at "
    "the university of {C3} , was married to {S} . {N} had worked in {C2} , where the work "
    "was hard , for many years and had died in {Y2} . what a life .";

inline std::string fill(std::string_view tmpl, std::string_view key, std::string_view value) {
  std::string out(tmpl);
  for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos)) {
    out.replace(pos, key.size(), value);
    pos += value.size();
  }
  return out;
}

}  // namespace detail

/// Builds the corpus deterministically from config.seed.
inline SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  const std::size_t people = config.first_names * config.surnames;
  if (config.train_questions > people ||
      config.dev_questions + config.test_questions > config.train_questions) {
    throw PreconditionError("too many questions for the number of people");
  }

  Rng rng(config.seed);
  std::set<std::string> taken;
  const auto firsts = detail::pseudo_words(config.first_names, 2, 2, rng, taken);
  const auto lasts = detail::pseudo_words(config.surnames, 2, 3, rng, taken);
  const auto cities = detail::pseudo_words(config.cities, 2, 3, rng, taken);
  const auto spouses = detail::pseudo_words(config.spouses, 2, 3, rng, taken);
  const auto subjects = detail::pseudo_words(config.subjects, 2, 4, rng, taken);
  auto pick = [&](const std::vector<std::string>& pool) -> const std::string& {
    return pool[rng.uniform_int(pool.size())];
  };
  auto year = [&]() { return std::to_string(1800 + rng.uniform_int(200)); };

  SyntheticDataset ds;
  struct Person {
    std::string name;
    std::string pid;
    std::map<std::string, std::string> slots;
  };
  std::vector<Person> all;
  all.reserve(people);
  for (std::size_t f = 0; f < config.first_names; ++f) {
    for (std::size_t l = 0; l < config.surnames; ++l) {
      char pid[16];
      std::snprintf(pid, sizeof(pid), "p%05zu", all.size());
      Person person{firsts[f] + " " + lasts[l], pid, {}};
      person.slots["{C1}"] = pick(cities);
      person.slots["{Y1}"] = year();
      person.slots["{S}"] = pick(spouses);
      person.slots["{U}"] = pick(subjects);
      person.slots["{C3}"] = pick(cities);
      person.slots["{C2}"] = pick(cities);
      person.slots["{Y2}"] = year();
      std::string text = detail::fill(detail::kBiography, "{N}", person.name);
      for (const auto& [slot, value] : person.slots) text = detail::fill(text, slot, value);
      ds.passages.add({person.pid, text});
      all.push_back(std::move(person));
    }
  }

  // Training questions cover distinct people. Dev and test questions ask a
  // different relation about people who already have a training question.
  rng.shuffle(all);
  std::vector<std::size_t> train_relation(config.train_questions);
  auto add = [&](QuestionSet& qs, std::string qid, const Person& person, std::size_t r) {
    qs.add({qid, detail::fill(detail::kRelations[r].question, "{N}", person.name),
            {person.slots.at(std::string(detail::kRelations[r].answer))}});
    ds.qrels.add(std::move(qid), person.pid);
  };
  char qid[24];
  for (std::size_t i = 0; i < config.train_questions; ++i) {
    train_relation[i] = rng.uniform_int(detail::kRelations.size());
    std::snprintf(qid, sizeof(qid), "train%04zu", i);
    add(ds.train, qid, all[i], train_relation[i]);
  }
  auto other_relation = [&](std::size_t i) {
    const auto shift = 1 + rng.uniform_int(detail::kRelations.size() - 1);
    return (train_relation[i] + shift) % detail::kRelations.size();
  };
  for (std::size_t i = 0; i < config.test_questions; ++i) {
    std::snprintf(qid, sizeof(qid), "test%04zu", i);
    add(ds.test, qid, all[i], other_relation(i));
  }
  for (std::size_t i = 0; i < config.dev_questions; ++i) {
    const auto person = config.test_questions + i;
    std::snprintf(qid, sizeof(qid), "dev%04zu", i);
    add(ds.dev, qid, all[person], other_relation(person));
  }
  return ds;
}

}  // namespace robustdr
