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

// Robustness analyses over typoed test sets: binning by the training
// frequency or relative importance of typoed words, the typo-removal
// baseline, and the per-setting trend table.

#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "robustdr/common.hpp"
#include "robustdr/corpus.hpp"
#include "robustdr/evaluation.hpp"
#include "robustdr/textproc.hpp"
#include "robustdr/typogen.hpp"

namespace robustdr {

// ---------------------------------------------------------------------------
// Training frequency

/// Token counts of words over the training questions.
class FrequencyTable {
 public:
  FrequencyTable() = default;

  static FrequencyTable build(const QuestionSet& train_questions) {
    FrequencyTable t;
    for (const auto& q : train_questions) {
      for (auto& w : split_words(q.text)) ++t.counts_[std::move(w.text)];
    }
    return t;
  }

  std::int64_t count(std::string_view word) const {
    auto it = counts_.find(std::string(word));
    return it == counts_.end() ? 0 : it->second;
  }

 private:
  std::unordered_map<std::string, std::int64_t> counts_;
};

inline std::int64_t train_frequency(std::string_view word, const FrequencyTable& table) {
  return table.count(word);
}

// ---------------------------------------------------------------------------
// Binning

/// system name -> per-query scores.
using SystemScores = std::map<std::string, PerQueryScores>;

struct Bin {
  double lower;
  double upper;  // exclusive; +inf for the last bin
  std::size_t count = 0;
  std::map<std::string, double> mean;  // system -> mean metric in this bin
  std::vector<std::string> question_ids;
};

struct BinnedReport {
  std::string key;  // "train_frequency" or "relative_importance"
  std::vector<double> edges;
  std::vector<Bin> bins;
  /// Questions without any edit; excluded from the bins.
  std::vector<std::string> flagged;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& b : bins) n += b.count;
    return n;
  }
};

inline const std::vector<double>& default_frequency_edges() {
  static const std::vector<double> edges = {0, 1, 11, 101, 1001};
  return edges;
}

namespace detail {

inline void check_edges(const std::vector<double>& edges) {
  if (edges.empty()) throw PreconditionError("bin edges must not be empty");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw PreconditionError("bin edges must be increasing");
  }
}

/// Index of the left-closed bin holding key.
inline std::size_t bin_of(double key, const std::vector<double>& edges) {
  if (key < edges.front()) throw PreconditionError("bin key below the first edge");
  auto it = std::upper_bound(edges.begin(), edges.end(), key);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

/// Shared binning given a key per edited question.
inline BinnedReport bin_questions(std::string key_name, const TypoedQuestionSet& set,
                                  const SystemScores& scores, std::vector<double> edges,
                                  const std::function<double(const TypoedQuestion&)>& key_of) {
  check_edges(edges);
  BinnedReport report;
  report.key = std::move(key_name);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Bin b;
    b.lower = edges[i];
    b.upper = i + 1 < edges.size() ? edges[i + 1] : std::numeric_limits<double>::infinity();
    for (const auto& [sys, s] : scores) b.mean[sys] = 0.0;
    report.bins.push_back(std::move(b));
  }
  report.edges = std::move(edges);
  for (const auto& t : set) {
    if (t.edits.empty()) {
      report.flagged.push_back(t.base_question_id);
      continue;
    }
    auto& bin = report.bins[bin_of(key_of(t), report.edges)];
    ++bin.count;
    bin.question_ids.push_back(t.base_question_id);
    for (const auto& [sys, s] : scores) {
      auto it = s.find(t.base_question_id);
      if (it == s.end()) {
        throw PreconditionError("system " + sys + " has no score for question " +
                                t.base_question_id);
      }
      bin.mean[sys] += it->second;
    }
  }
  for (auto& b : report.bins) {
    if (b.count == 0) continue;
    for (auto& [sys, m] : b.mean) m /= static_cast<double>(b.count);
  }
  return report;
}

}  // namespace detail

/// Bins edited questions by the minimum training frequency of their
/// typoed words.
inline BinnedReport bin_by_frequency(const TypoedQuestionSet& set, const SystemScores& scores,
                                     const FrequencyTable& table,
                                     std::vector<double> edges = default_frequency_edges()) {
  return detail::bin_questions("train_frequency", set, scores, std::move(edges),
                               [&](const TypoedQuestion& t) {
                                 auto key = std::numeric_limits<std::int64_t>::max();
                                 for (const auto& e : t.edits) {
                                   key = std::min(key, train_frequency(e.original, table));
                                 }
                                 return static_cast<double>(key);
                               });
}

/// Largest relative importance among a typoed question's edited words.
inline double importance_key(const TypoedQuestion& t, const QuestionSet& questions,
                             const IdfTable& idf_table) {
  const auto words = word_strings(questions.at(t.base_question_id).text);
  const auto rel = relative_importances(words, idf_table);
  double key = 0.0;
  for (const auto& e : t.edits) {
    if (e.word_index >= rel.size()) {
      throw DataError("edit index out of range for question " + t.base_question_id);
    }
    key = std::max(key, rel[e.word_index]);
  }
  return key;
}

/// Quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw PreconditionError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// {0, q25, q50, q75} over the keys of the edited questions, duplicates
/// dropped.
inline std::vector<double> importance_quartile_edges(const TypoedQuestionSet& set,
                                                     const QuestionSet& questions,
                                                     const IdfTable& idf_table) {
  std::vector<double> keys;
  for (const auto& t : set) {
    if (!t.edits.empty()) keys.push_back(importance_key(t, questions, idf_table));
  }
  std::vector<double> edges = {0.0};
  if (keys.empty()) return edges;
  for (double q : {0.25, 0.5, 0.75}) {
    const double v = quantile(keys, q);
    if (v > edges.back()) edges.push_back(v);
  }
  return edges;
}

/// Bins edited questions by the largest relative importance of their typoed
/// words. Empty edges select the quartiles of the test set.
inline BinnedReport bin_by_importance(const TypoedQuestionSet& set, const SystemScores& scores,
                                      const QuestionSet& questions, const IdfTable& idf_table,
                                      std::vector<double> edges = {}) {
  if (edges.empty()) edges = importance_quartile_edges(set, questions, idf_table);
  return detail::bin_questions(
      "relative_importance", set, scores, std::move(edges),
      [&](const TypoedQuestion& t) { return importance_key(t, questions, idf_table); });
}

/// key,lower,upper,count,<system...>
inline std::string format_binned_report(const BinnedReport& r) {
  std::string out = "key,lower,upper,count";
  std::vector<std::string> systems;
  if (!r.bins.empty()) {
    for (const auto& [sys, m] : r.bins.front().mean) systems.push_back(sys);
  }
  for (const auto& s : systems) out += "," + s;
  out += "\n";
  for (const auto& b : r.bins) {
    out += r.key + "," + format_double(b.lower) + "," +
           (std::isinf(b.upper) ? std::string("inf") : format_double(b.upper)) + "," +
           std::to_string(b.count);
    for (const auto& s : systems) out += "," + (b.count ? format_double(b.mean.at(s)) : "");
    out += "\n";
  }
  out += r.key + ",flagged,,"+ std::to_string(r.flagged.size());
  for (std::size_t i = 0; i < systems.size(); ++i) out += ",";
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Typo removal

struct RemovalVariant {
  std::string base_question_id;
  std::string text;
  std::vector<TypoEdit> removed;
  /// Every word was removed; the query encodes as a single [UNK].
  bool flagged = false;
};

/// Drops the typoed word positions from each question's original word
/// sequence.
inline std::vector<RemovalVariant> removal_baseline(const TypoedQuestionSet& set,
                                                    const QuestionSet& questions) {
  std::vector<RemovalVariant> out;
  out.reserve(set.size());
  for (const auto& t : set) {
    const auto& q = questions.at(t.base_question_id);
    RemovalVariant v{t.base_question_id, q.text, t.edits, false};
    if (!t.edits.empty()) {
      const auto words = word_strings(q.text);
      std::set<std::size_t> drop;
      for (const auto& e : t.edits) drop.insert(e.word_index);
      std::vector<std::string> kept;
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (!drop.contains(i)) kept.push_back(words[i]);
      }
      v.text = join_words(kept);
      v.flagged = kept.empty();
    }
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trend table

inline constexpr std::array<std::string_view, 4> kTrendSettings = {
    "Original", "RandomWords", "NonStopwords", "DiscriminativeUtterances"};

/// system -> setting -> per-query scores for one metric.
using TrendInput = std::map<std::string, std::map<std::string, PerQueryScores>>;

struct TrendRow {
  std::string system;
  std::string setting;
  double mean = 0.0;
  double delta = 0.0;  // mean minus the Original mean
  std::optional<TTestResult> test;  // against Original; absent for Original
};

struct TrendReport {
  std::string metric;
  std::vector<TrendRow> rows;
  std::vector<std::string> warnings;
};

inline TrendReport trend_report(const TrendInput& input, std::string metric) {
  TrendReport report{std::move(metric), {}, {}};
  for (const auto& [system, settings] : input) {
    auto orig = settings.find("Original");
    if (orig == settings.end()) {
      report.warnings.push_back(system + ": missing setting Original; deltas omitted");
    }
    const double base = orig == settings.end() ? 0.0 : mean_of(orig->second);
    for (auto name : kTrendSettings) {
      auto it = settings.find(std::string(name));
      if (it == settings.end()) {
        if (name != "Original") {
          report.warnings.push_back(system + ": missing setting " + std::string(name));
        }
        continue;
      }
      TrendRow row{system, std::string(name), mean_of(it->second), 0.0, std::nullopt};
      if (orig != settings.end()) {
        row.delta = row.mean - base;
        if (name != "Original" && it->second.size() >= 2) {
          row.test = paired_t_test(it->second, orig->second);
        }
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

/// system,setting,metric,mean,delta,t,p,significant@0.05
inline std::string format_trend_report(const TrendReport& r) {
  std::string out = "system,setting,metric,mean,delta,t,p,significant@0.05\n";
  for (const auto& row : r.rows) {
    out += row.system + "," + row.setting + "," + r.metric + "," + format_double(row.mean) + "," +
           format_double(row.delta) + ",";
    if (row.test) {
      out += format_double(row.test->t) + "," + format_double(row.test->p) + "," +
             (row.test->p < kSignificanceLevel ? "1" : "0");
    } else {
      out += ",,";
    }
    out += "\n";
  }
  return out;
}

}  // namespace robustdr
