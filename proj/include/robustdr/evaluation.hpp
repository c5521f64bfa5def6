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

// Ranking metrics (MRR@k, Recall@k, Answer Recall@k) and the paired t-test.

#pragma once

#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "robustdr/common.hpp"
#include "robustdr/corpus.hpp"
#include "robustdr/retrieval.hpp"

namespace robustdr {

/// question id -> per-query metric value in [0, 1].
using PerQueryScores = std::map<std::string, double>;

struct MetricReport {
  std::string metric;
  std::size_t k = 0;
  double mean = 0.0;
  PerQueryScores per_query;

  std::string label() const { return metric + "@" + std::to_string(k); }
};

/// Arithmetic mean; 0 for an empty set.
inline double mean_of(const PerQueryScores& scores) {
  if (scores.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& [qid, v] : scores) acc += v;
  return acc / static_cast<double>(scores.size());
}

namespace detail {

inline MetricReport finish(std::string metric, std::size_t k, PerQueryScores per_query) {
  MetricReport r{std::move(metric), k, 0.0, std::move(per_query)};
  r.mean = mean_of(r.per_query);
  return r;
}

inline void check_k(std::size_t k) {
  if (k == 0) throw PreconditionError("metric cutoff k must be >= 1");
}

}  // namespace detail

/// Reciprocal rank of the first relevant passage within the top k (0 if
/// none). Queries without judgments are skipped.
inline MetricReport mrr_at_k(const RunResult& run, const RelevanceJudgments& qrels,
                             std::size_t k) {
  detail::check_k(k);
  PerQueryScores scores;
  for (const auto& [qid, list] : run) {
    if (qrels.relevant(qid).empty()) continue;
    double rr = 0.0;
    for (std::size_t r = 0; r < list.size() && r < k; ++r) {
      if (qrels.is_relevant(qid, list[r].passage_id)) {
        rr = 1.0 / static_cast<double>(r + 1);
        break;
      }
    }
    scores[qid] = rr;
  }
  return detail::finish("mrr", k, std::move(scores));
}

/// Fraction of a query's relevant passages found in the top k.
inline MetricReport recall_at_k(const RunResult& run, const RelevanceJudgments& qrels,
                                std::size_t k) {
  detail::check_k(k);
  PerQueryScores scores;
  for (const auto& [qid, list] : run) {
    const auto& rel = qrels.relevant(qid);
    if (rel.empty()) continue;
    std::set<std::string> found;
    for (std::size_t r = 0; r < list.size() && r < k; ++r) {
      if (qrels.is_relevant(qid, list[r].passage_id)) found.insert(list[r].passage_id);
    }
    scores[qid] = static_cast<double>(found.size()) / static_cast<double>(rel.size());
  }
  return detail::finish("recall", k, std::move(scores));
}

/// Answer matching normalisation: ASCII lowercase, split on whitespace,
/// strip punctuation from both ends of each token, drop empty tokens.
inline std::vector<std::string> normalize_answer_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&]() {
    std::size_t b = 0, e = cur.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
    if (e > b) out.push_back(cur.substr(b, e - b));
    cur.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return out;
}

/// True if the normalised answer occurs as a contiguous token sequence of
/// the normalised passage text.
inline bool contains_answer(std::string_view passage_text, std::string_view answer) {
  const auto hay = normalize_answer_tokens(passage_text);
  const auto needle = normalize_answer_tokens(answer);
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size() && match; ++j) match = hay[i + j] == needle[j];
    if (match) return true;
  }
  return false;
}

/// 1 if any top-k passage contains any gold answer, else 0. Questions
/// without answers are skipped.
inline MetricReport answer_recall_at_k(const RunResult& run, const QuestionSet& questions,
                                       const PassageCollection& passages, std::size_t k) {
  detail::check_k(k);
  PerQueryScores scores;
  for (const auto& [qid, list] : run) {
    auto qi = questions.find(qid);
    if (!qi || questions[*qi].answers.empty()) continue;
    const auto& answers = questions[*qi].answers;
    double hit = 0.0;
    for (std::size_t r = 0; r < list.size() && r < k && hit == 0.0; ++r) {
      const auto& text = passages.at(list[r].passage_id).text;
      for (const auto& a : answers) {
        if (contains_answer(text, a)) {
          hit = 1.0;
          break;
        }
      }
    }
    scores[qid] = hit;
  }
  return detail::finish("answer_recall", k, std::move(scores));
}

// ---------------------------------------------------------------------------
// Significance

namespace detail {

/// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

/// Regularised incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw PreconditionError("incomplete beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fastest for x < (a + 1) / (a + b + 2).
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability of Student's t with `dof` degrees of freedom.
inline double student_t_two_sided_p(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

/// Paired t-test on a - b over identical question-id sets.
inline TTestResult paired_t_test(const PerQueryScores& a, const PerQueryScores& b) {
  if (a.size() != b.size()) throw PreconditionError("paired_t_test: question sets differ");
  std::vector<double> diffs;
  diffs.reserve(a.size());
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw PreconditionError("paired_t_test: question sets differ");
    diffs.push_back(ia->second - ib->second);
  }
  const std::size_t n = diffs.size();
  if (n < 2) throw PreconditionError("paired_t_test: need at least two pairs");
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTestResult r;
  r.n = n;
  if (sd == 0.0) {
    if (mean == 0.0) return r;
    r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, static_cast<double>(n - 1));
  return r;
}

inline constexpr double kSignificanceLevel = 0.05;

// ---------------------------------------------------------------------------
// Reports

/// metric,k,mean,n
inline std::string format_eval_report(const std::vector<MetricReport>& reports) {
  std::string out = "metric,k,mean,n\n";
  for (const auto& r : reports) {
    out += r.metric + "," + std::to_string(r.k) + "," + format_double(r.mean) + "," +
           std::to_string(r.per_query.size()) + "\n";
  }
  return out;
}

/// qid followed by one column per report.
inline std::string format_per_query(const std::vector<MetricReport>& reports) {
  std::string out = "qid";
  std::set<std::string> qids;
  for (const auto& r : reports) {
    out += "," + r.label();
    for (const auto& [qid, v] : r.per_query) qids.insert(qid);
  }
  out += "\n";
  for (const auto& qid : qids) {
    out += qid;
    for (const auto& r : reports) {
      auto it = r.per_query.find(qid);
      out += ",";
      if (it != r.per_query.end()) out += format_double(it->second);
    }
    out += "\n";
  }
  return out;
}

struct SignificanceRow {
  std::string system_a;
  std::string system_b;
  std::string metric;
  TTestResult test;
};

/// system_a,system_b,metric,t,p,significant@0.05
inline std::string format_significance(const std::vector<SignificanceRow>& rows) {
  std::string out = "system_a,system_b,metric,t,p,significant@0.05\n";
  for (const auto& r : rows) {
    out += r.system_a + "," + r.system_b + "," + r.metric + "," + format_double(r.test.t) + "," +
           format_double(r.test.p) + "," + (r.test.p < kSignificanceLevel ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace robustdr
