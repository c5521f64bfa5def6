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

// Passage collections, question sets and relevance judgments.
//
// All files are UTF-8, tab separated, one record per line, no header:
//   passages.tsv   id <TAB> text
//   questions.tsv  id <TAB> text [<TAB> JSON array of answer strings]
//   qrels.tsv      question-id <TAB> passage-id

#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "robustdr/common.hpp"

namespace robustdr {

struct Passage {
  std::string id;
  std::string text;
};

struct Question {
  std::string id;
  std::string text;
  std::vector<std::string> answers;
};

/// Insertion-ordered records with unique ids. Position in the collection is
/// the dense index used to address embedding rows.
template <typename Record>
class Collection {
 public:
  Collection() = default;

  void add(Record record) {
    if (record.id.empty()) throw DataError("empty id");
    if (record.text.empty()) throw DataError("empty text for id " + record.id);
    auto [it, inserted] = by_id_.emplace(record.id, records_.size());
    if (!inserted) throw DataError("duplicate id " + record.id);
    records_.push_back(std::move(record));
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const Record& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  std::optional<std::size_t> find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view id) const { return find(id).has_value(); }

  const Record& at(std::string_view id) const {
    auto i = find(id);
    if (!i) throw DataError("unknown id " + std::string(id));
    return records_[*i];
  }

 private:
  std::vector<Record> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

using PassageCollection = Collection<Passage>;
using QuestionSet = Collection<Question>;

enum class SplitName { kTrain, kDev, kTest };

inline std::string_view to_string(SplitName s) {
  switch (s) {
    case SplitName::kTrain: return "train";
    case SplitName::kDev: return "dev";
    case SplitName::kTest: return "test";
  }
  return "?";
}

struct DatasetSplit {
  SplitName name;
  const QuestionSet* questions;
};

/// Throws DataError naming every question id shared by two splits.
inline void check_disjoint(const std::vector<DatasetSplit>& splits) {
  std::map<std::string, std::string> owner;
  std::vector<std::string> clashes;
  for (const auto& split : splits) {
    for (const auto& q : *split.questions) {
      auto [it, inserted] = owner.emplace(q.id, std::string(to_string(split.name)));
      if (!inserted) {
        clashes.push_back(q.id + " (" + it->second + ", " +
                          std::string(to_string(split.name)) + ")");
      }
    }
  }
  if (!clashes.empty()) {
    std::string msg = "splits overlap on question ids:";
    for (const auto& c : clashes) msg += " " + c;
    throw DataError(msg);
  }
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

/// Calls fn(line_number, fields) for every non-blank line.
template <typename Fn>
void for_each_record(std::string_view content, const std::string& path, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      fn(line_no, split_tabs(line));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline void check_field(std::string_view field, std::string_view what) {
  if (field.find_first_of("\t\n\r") != std::string_view::npos) {
    throw DataError(std::string(what) + " contains a tab or newline: " +
                    std::string(field));
  }
}

}  // namespace detail

inline PassageCollection parse_passages(std::string_view content,
                                        const std::string& path = "<passages>") {
  PassageCollection out;
  detail::for_each_record(content, path, [&](std::size_t, const auto& f) {
    if (f.size() != 2) {
      throw DataError("expected 2 fields (id, text), got " + std::to_string(f.size()));
    }
    out.add({std::string(f[0]), std::string(f[1])});
  });
  return out;
}

inline PassageCollection load_passages(const std::string& path) {
  return parse_passages(read_file(path), path);
}

inline QuestionSet parse_questions(std::string_view content,
                                   const std::string& path = "<questions>") {
  QuestionSet out;
  detail::for_each_record(content, path, [&](std::size_t, const auto& f) {
    if (f.size() != 2 && f.size() != 3) {
      throw DataError("expected 2 or 3 fields (id, text[, answers]), got " +
                      std::to_string(f.size()));
    }
    Question q{std::string(f[0]), std::string(f[1]), {}};
    if (f.size() == 3 && !f[2].empty()) {
      nlohmann::json answers;
      try {
        answers = nlohmann::json::parse(f[2]);
      } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("answers is not valid JSON: ") + e.what());
      }
      if (!answers.is_array()) throw DataError("answers must be a JSON array");
      for (const auto& a : answers) {
        if (!a.is_string()) throw DataError("answers must be strings");
        q.answers.push_back(a.get<std::string>());
      }
    }
    out.add(std::move(q));
  });
  return out;
}

inline QuestionSet load_questions(const std::string& path) {
  return parse_questions(read_file(path), path);
}

/// question id -> relevant passage ids (binary relevance). Validation against
/// the collections is a separate step.
class RelevanceJudgments {
 public:
  void add(std::string qid, std::string pid) {
    auto& pids = by_question_[std::move(qid)];
    for (const auto& p : pids) {
      if (p == pid) return;
    }
    pids.push_back(std::move(pid));
  }

  const std::vector<std::string>& relevant(std::string_view qid) const {
    static const std::vector<std::string> kNone;
    auto it = by_question_.find(std::string(qid));
    return it == by_question_.end() ? kNone : it->second;
  }

  bool is_relevant(std::string_view qid, std::string_view pid) const {
    for (const auto& p : relevant(qid)) {
      if (p == pid) return true;
    }
    return false;
  }

  std::size_t size() const { return by_question_.size(); }
  bool empty() const { return by_question_.empty(); }
  const std::map<std::string, std::vector<std::string>>& entries() const {
    return by_question_;
  }

 private:
  std::map<std::string, std::vector<std::string>> by_question_;
};

inline RelevanceJudgments parse_qrels(std::string_view content,
                                      const std::string& path = "<qrels>") {
  RelevanceJudgments out;
  detail::for_each_record(content, path, [&](std::size_t, const auto& f) {
    if (f.size() != 2 || f[0].empty() || f[1].empty()) {
      throw DataError("expected (question-id, passage-id) pair");
    }
    out.add(std::string(f[0]), std::string(f[1]));
  });
  return out;
}

inline RelevanceJudgments load_qrels(const std::string& path) {
  return parse_qrels(read_file(path), path);
}

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
  std::string message() const {
    std::string msg;
    for (const auto& p : problems) {
      if (!msg.empty()) msg += "; ";
      msg += p;
    }
    return msg;
  }
};

/// Checks judgments against the collections. Judgments for questions outside
/// `questions` are ignored so one qrels file can serve all splits. With
/// `require_relevant` (training splits) every question needs a relevant
/// passage. All problems are collected before returning.
inline ValidationReport validate(const RelevanceJudgments& qrels,
                                 const PassageCollection& passages,
                                 const QuestionSet& questions,
                                 bool require_relevant) {
  ValidationReport report;
  for (const auto& q : questions) {
    const auto& pids = qrels.relevant(q.id);
    if (pids.empty() && require_relevant) {
      report.problems.push_back("question " + q.id + " has no relevant passage");
    }
    for (const auto& pid : pids) {
      if (!passages.contains(pid)) {
        report.problems.push_back("question " + q.id + " references unknown passage " + pid);
      }
    }
  }
  return report;
}

/// Every judged question id must exist in one of the given sets.
inline ValidationReport validate_question_ids(const RelevanceJudgments& qrels,
                                              const std::vector<const QuestionSet*>& sets) {
  ValidationReport report;
  for (const auto& [qid, pids] : qrels.entries()) {
    bool found = false;
    for (const auto* s : sets) found = found || s->contains(qid);
    if (!found) report.problems.push_back("unknown question " + qid);
  }
  return report;
}

inline std::string format_passages(const PassageCollection& passages) {
  std::string out;
  for (const auto& p : passages) {
    detail::check_field(p.id, "passage id");
    detail::check_field(p.text, "passage text");
    out += p.id + "\t" + p.text + "\n";
  }
  return out;
}

inline std::string format_questions(const QuestionSet& questions) {
  std::string out;
  for (const auto& q : questions) {
    detail::check_field(q.id, "question id");
    detail::check_field(q.text, "question text");
    out += q.id + "\t" + q.text;
    if (!q.answers.empty()) out += "\t" + nlohmann::json(q.answers).dump();
    out += "\n";
  }
  return out;
}

inline std::string format_qrels(const RelevanceJudgments& qrels) {
  std::string out;
  for (const auto& [qid, pids] : qrels.entries()) {
    for (const auto& pid : pids) out += qid + "\t" + pid + "\n";
  }
  return out;
}

inline void write_passages(const std::string& path, const PassageCollection& p) {
  write_file(path, format_passages(p));
}
inline void write_questions(const std::string& path, const QuestionSet& q) {
  write_file(path, format_questions(q));
}
inline void write_qrels(const std::string& path, const RelevanceJudgments& r) {
  write_file(path, format_qrels(r));
}

}  // namespace robustdr
