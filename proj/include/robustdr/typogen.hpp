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

// Typo simulation: character-level random edits, QWERTY neighbour
// substitutions and dictionary misspellings, plus the three test settings
// that decide which words of a question may receive a typo.

#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "robustdr/common.hpp"
#include "robustdr/corpus.hpp"
#include "robustdr/misspellings_data.hpp"
#include "robustdr/textproc.hpp"

namespace robustdr {

enum class TypoKind {
  kRandomInsert,
  kRandomDelete,
  kRandomSwap,
  kRandomSubstitute,
  kKeyboard,
  kMisspelling,
};

inline constexpr std::array<TypoKind, 6> kAllTypoKinds = {
    TypoKind::kRandomInsert, TypoKind::kRandomDelete, TypoKind::kRandomSwap,
    TypoKind::kRandomSubstitute, TypoKind::kKeyboard, TypoKind::kMisspelling};

inline std::string_view to_string(TypoKind k) {
  switch (k) {
    case TypoKind::kRandomInsert: return "RandomInsert";
    case TypoKind::kRandomDelete: return "RandomDelete";
    case TypoKind::kRandomSwap: return "RandomSwap";
    case TypoKind::kRandomSubstitute: return "RandomSubstitute";
    case TypoKind::kKeyboard: return "Keyboard";
    case TypoKind::kMisspelling: return "Misspelling";
  }
  return "?";
}

inline TypoKind parse_typo_kind(std::string_view s) {
  for (auto k : kAllTypoKinds) {
    if (to_string(k) == s) return k;
  }
  throw DataError("unknown typo kind " + std::string(s));
}

enum class TypoSetting { kRandomWords, kNonStopwords, kDiscriminativeUtterances };

inline std::string_view to_string(TypoSetting s) {
  switch (s) {
    case TypoSetting::kRandomWords: return "RandomWords";
    case TypoSetting::kNonStopwords: return "NonStopwords";
    case TypoSetting::kDiscriminativeUtterances: return "DiscriminativeUtterances";
  }
  return "?";
}

/// Accepts the canonical names and the short CLI forms random, nonstop and
/// discriminative.
inline TypoSetting parse_typo_setting(std::string_view s) {
  if (s == "RandomWords" || s == "random") return TypoSetting::kRandomWords;
  if (s == "NonStopwords" || s == "nonstop" || s == "non-stopwords") {
    return TypoSetting::kNonStopwords;
  }
  if (s == "DiscriminativeUtterances" || s == "discriminative") {
    return TypoSetting::kDiscriminativeUtterances;
  }
  throw ConfigError("unknown typo setting '" + std::string(s) +
                    "' (expected random, nonstop or discriminative)");
}

// ---------------------------------------------------------------------------
// Resources

/// Lowercase letter -> neighbouring keys on a QWERTY layout.
class KeyboardLayout {
 public:
  KeyboardLayout() = default;
  explicit KeyboardLayout(std::map<char, std::string> neighbours)
      : neighbours_(std::move(neighbours)) {
    for (const auto& [k, ns] : neighbours_) {
      if (k < 'a' || k > 'z') throw DataError(std::string("keyboard key not a lowercase letter: ") + k);
      for (char n : ns) {
        if (n == k) throw DataError(std::string("key listed as its own neighbour: ") + k);
      }
    }
  }

  /// Horizontal, vertical and diagonal neighbours on the three letter rows,
  /// with rows staggered by a quarter and three quarters of a key.
  static KeyboardLayout qwerty() {
    static constexpr std::array<std::string_view, 3> kRows = {"qwertyuiop", "asdfghjkl",
                                                              "zxcvbnm"};
    static constexpr std::array<double, 3> kOffsets = {0.0, 0.25, 0.75};
    std::map<char, std::string> out;
    for (std::size_t r = 0; r < kRows.size(); ++r) {
      for (std::size_t i = 0; i < kRows[r].size(); ++i) {
        std::string ns;
        if (i > 0) ns.push_back(kRows[r][i - 1]);
        if (i + 1 < kRows[r].size()) ns.push_back(kRows[r][i + 1]);
        const double x = kOffsets[r] + static_cast<double>(i);
        for (std::size_t rr : {r - 1, r + 1}) {
          if (rr >= kRows.size()) continue;  // r - 1 wraps for r == 0
          for (std::size_t j = 0; j < kRows[rr].size(); ++j) {
            const double xx = kOffsets[rr] + static_cast<double>(j);
            if (std::abs(x - xx) < 1.0) ns.push_back(kRows[rr][j]);
          }
        }
        out[kRows[r][i]] = ns;
      }
    }
    return KeyboardLayout(std::move(out));
  }

  /// key <TAB> neighbour letters, one key per line.
  static KeyboardLayout parse(std::string_view content) {
    std::map<char, std::string> out;
    detail::for_each_record(content, "<keyboard>", [&](std::size_t, const auto& f) {
      if (f.size() != 2 || f[0].size() != 1 || f[1].empty()) {
        throw DataError("expected key <TAB> neighbours");
      }
      out[f[0][0]] = std::string(f[1]);
    });
    return KeyboardLayout(std::move(out));
  }

  static KeyboardLayout load(const std::string& path) { return parse(read_file(path)); }

  std::string to_text() const {
    std::string out;
    for (const auto& [k, ns] : neighbours_) out += std::string(1, k) + "\t" + ns + "\n";
    return out;
  }

  std::string_view neighbours(char c) const {
    auto it = neighbours_.find(c);
    return it == neighbours_.end() ? std::string_view{} : std::string_view(it->second);
  }

  bool adjacent(char a, char b) const { return neighbours(a).find(b) != std::string_view::npos; }

 private:
  std::map<char, std::string> neighbours_;
};

/// correct word -> misspelled variants.
class MisspellingDictionary {
 public:
  MisspellingDictionary() = default;

  /// correct <TAB> comma-separated variants.
  static MisspellingDictionary parse(std::string_view content,
                                     const std::string& path = "<misspellings>") {
    MisspellingDictionary d;
    detail::for_each_record(content, path, [&](std::size_t, const auto& f) {
      if (f.size() != 2 || f[0].empty()) throw DataError("expected correct <TAB> variants");
      std::string key(f[0]);
      for (char c : key) {
        if (c >= 'A' && c <= 'Z') throw DataError("key not lowercase: " + key);
      }
      std::vector<std::string> variants;
      std::string_view rest = f[1];
      while (!rest.empty()) {
        std::size_t comma = rest.find(',');
        std::string v(rest.substr(0, comma));
        if (v.empty()) throw DataError("empty variant for " + key);
        if (v == key) throw DataError("variant equals its key: " + key);
        variants.push_back(std::move(v));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (variants.empty()) throw DataError("no variants for " + key);
      d.entries_[key] = std::move(variants);
    });
    return d;
  }

  static MisspellingDictionary load(const std::string& path) {
    return parse(read_file(path), path);
  }

  static const MisspellingDictionary& builtin() {
    static const MisspellingDictionary d = parse(kDefaultMisspellings);
    return d;
  }

  const std::vector<std::string>* variants(std::string_view word) const {
    auto it = entries_.find(std::string(word));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }

  std::string to_text() const {
    std::string out;
    for (const auto& [k, vs] : entries_) {
      out += k + "\t";
      for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? "," : "") + vs[i];
      out += "\n";
    }
    return out;
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

/// Everything the typo generator consults besides randomness.
struct TypoModel {
  KeyboardLayout keyboard = KeyboardLayout::qwerty();
  MisspellingDictionary misspellings = MisspellingDictionary::builtin();
  StopwordList stopwords;
};

// ---------------------------------------------------------------------------
// Word-level edits

/// Words shorter than this survive delete, swap, substitute and keyboard
/// edits.
inline constexpr std::size_t kMinEditLength = 2;

namespace detail {

inline bool is_lower_alpha(char c) { return c >= 'a' && c <= 'z'; }

inline std::vector<std::size_t> alpha_positions(std::string_view w) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_lower_alpha(w[i])) out.push_back(i);
  }
  return out;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.uniform_int(v.size())];
}

}  // namespace detail

/// Applies exactly one edit of the given kind. Returns nullopt when the kind
/// is inapplicable to the word (too short, no lowercase letter to edit, no
/// dictionary entry) so the caller can choose another kind.
inline std::optional<std::string> perturb_word(std::string_view word, TypoKind kind, Rng& rng,
                                               const TypoModel& model) {
  const auto alpha = detail::alpha_positions(word);
  if (alpha.empty() && kind != TypoKind::kMisspelling) return std::nullopt;
  if (word.size() < kMinEditLength && kind != TypoKind::kRandomInsert &&
      kind != TypoKind::kMisspelling) {
    return std::nullopt;
  }
  std::string out(word);
  switch (kind) {
    case TypoKind::kRandomInsert: {
      std::size_t pos = rng.uniform_int(word.size() + 1);
      char c = static_cast<char>('a' + rng.uniform_int(26));
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), c);
      return out;
    }
    case TypoKind::kRandomDelete: {
      out.erase(detail::pick(alpha, rng), 1);
      return out;
    }
    case TypoKind::kRandomSwap: {
      std::vector<std::size_t> swaps;
      for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        if (detail::is_lower_alpha(word[i]) && detail::is_lower_alpha(word[i + 1]) &&
            word[i] != word[i + 1]) {
          swaps.push_back(i);
        }
      }
      if (swaps.empty()) return std::nullopt;
      std::size_t i = detail::pick(swaps, rng);
      std::swap(out[i], out[i + 1]);
      return out;
    }
    case TypoKind::kRandomSubstitute: {
      std::size_t pos = detail::pick(alpha, rng);
      // Uniform over the 25 other letters.
      char c = static_cast<char>('a' + rng.uniform_int(25));
      if (c >= out[pos]) ++c;
      out[pos] = c;
      return out;
    }
    case TypoKind::kKeyboard: {
      std::vector<std::size_t> keyed;
      for (std::size_t i : alpha) {
        if (!model.keyboard.neighbours(word[i]).empty()) keyed.push_back(i);
      }
      if (keyed.empty()) return std::nullopt;
      std::size_t pos = detail::pick(keyed, rng);
      auto ns = model.keyboard.neighbours(word[pos]);
      out[pos] = ns[rng.uniform_int(ns.size())];
      return out;
    }
    case TypoKind::kMisspelling: {
      const auto* variants = model.misspellings.variants(word);
      if (variants == nullptr) return std::nullopt;
      return detail::pick(*variants, rng);
    }
  }
  return std::nullopt;
}

/// Selection weight of each kind: uniform over the three families (random
/// edit, keyboard, misspelling), then uniform within the random family.
inline double kind_weight(TypoKind k) {
  switch (k) {
    case TypoKind::kKeyboard:
    case TypoKind::kMisspelling:
      return 1.0 / 3.0;
    default:
      return 1.0 / 12.0;
  }
}

struct KindedEdit {
  std::string typoed;
  TypoKind kind;
};

/// Draws kinds by weight, resampling among the remaining kinds whenever the
/// drawn one is inapplicable. nullopt if no kind applies.
inline std::optional<KindedEdit> random_word_edit(std::string_view word, Rng& rng,
                                                  const TypoModel& model) {
  std::vector<TypoKind> remaining(kAllTypoKinds.begin(), kAllTypoKinds.end());
  while (!remaining.empty()) {
    double total = 0.0;
    for (auto k : remaining) total += kind_weight(k);
    double u = rng.uniform01() * total;
    std::size_t chosen = remaining.size() - 1;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      u -= kind_weight(remaining[i]);
      if (u < 0.0) {
        chosen = i;
        break;
      }
    }
    const TypoKind kind = remaining[chosen];
    if (auto typoed = perturb_word(word, kind, rng, model)) return KindedEdit{*typoed, kind};
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Eligibility

using WordSpan = std::pair<std::size_t, std::size_t>;  // [begin, end) word indices

/// Maximal shared contiguous word sequences (length >= 2) between question
/// and passage, extracted longest first (leftmost on ties) without overlap
/// in the question. Spans made only of stopwords are not discriminative and
/// are skipped.
inline std::vector<WordSpan> discriminative_utterances(std::span<const std::string> question,
                                                       std::span<const std::string> passage,
                                                       const StopwordList& stopwords =
                                                           default_stopwords()) {
  std::vector<WordSpan> spans;
  std::vector<bool> used(question.size(), false);
  while (true) {
    std::size_t best_len = 0;
    std::size_t best_start = 0;
    for (std::size_t i = 0; i < question.size(); ++i) {
      if (used[i]) continue;
      for (std::size_t j = 0; j < passage.size(); ++j) {
        std::size_t len = 0;
        bool content = false;
        while (i + len < question.size() && j + len < passage.size() && !used[i + len] &&
               question[i + len] == passage[j + len]) {
          content = content || !stopwords.contains(question[i + len]);
          ++len;
        }
        if (len >= 2 && content && len > best_len) {
          best_len = len;
          best_start = i;
        }
      }
    }
    if (best_len == 0) break;
    for (std::size_t k = best_start; k < best_start + best_len; ++k) used[k] = true;
    spans.emplace_back(best_start, best_start + best_len);
  }
  std::sort(spans.begin(), spans.end());
  return spans;
}

/// Indices of the words that may receive a typo under `setting`. The
/// discriminative setting needs the question's relevant passages (as word
/// lists); spans are pooled across them.
inline std::vector<std::size_t> eligible_indices(
    std::span<const std::string> words, TypoSetting setting,
    std::span<const std::vector<std::string>> relevant_passages = {},
    const StopwordList& stopwords = default_stopwords()) {
  std::vector<std::size_t> out;
  switch (setting) {
    case TypoSetting::kRandomWords:
      for (std::size_t i = 0; i < words.size(); ++i) out.push_back(i);
      break;
    case TypoSetting::kNonStopwords:
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (!stopwords.contains(words[i])) out.push_back(i);
      }
      break;
    case TypoSetting::kDiscriminativeUtterances: {
      if (relevant_passages.empty()) {
        throw PreconditionError("discriminative setting requires a relevant passage");
      }
      std::set<std::size_t> marked;
      for (const auto& p : relevant_passages) {
        for (auto [b, e] : discriminative_utterances(words, p, stopwords)) {
          for (std::size_t i = b; i < e; ++i) marked.insert(i);
        }
      }
      out.assign(marked.begin(), marked.end());
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Question-level perturbation

struct TypoEdit {
  std::size_t word_index;
  std::string original;
  std::string typoed;
  TypoKind kind;

  bool operator==(const TypoEdit&) const = default;
};

struct TypoedQuestion {
  std::string base_question_id;
  std::string text;
  std::vector<TypoEdit> edits;
  /// No edit could be applied (no eligible word, or no applicable kind).
  bool flagged = false;

  bool operator==(const TypoedQuestion&) const = default;
};

struct PerturbOptions {
  double p = 0.2;
  /// When p > 0 and the per-word coins select nothing, edit one eligible
  /// word chosen uniformly. Used for test sets and training variants so
  /// every question with an eligible word carries a typo.
  bool ensure_edit = false;
};

/// Perturbs a question. Each word position gets its own coin and its own
/// edit stream, both derived from a single draw of `rng`; the eligibility
/// set only masks positions, so changing the setting never shifts the coins
/// or edits of the remaining positions.
inline TypoedQuestion perturb_question(const Question& question,
                                       std::span<const std::size_t> eligible,
                                       const PerturbOptions& options, Rng& rng,
                                       const TypoModel& model) {
  if (!(options.p >= 0.0 && options.p <= 1.0)) {
    throw PreconditionError("typo probability must be in [0, 1]");
  }
  const std::uint64_t stream = rng.next();
  const auto words = split_words(question.text);
  std::vector<bool> is_eligible(words.size(), false);
  for (auto i : eligible) {
    if (i >= words.size()) throw PreconditionError("eligible index out of range");
    is_eligible[i] = true;
  }

  Rng coins(derive_seed(stream, "coin"));
  std::vector<bool> heads(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) heads[i] = coins.uniform01() < options.p;

  auto edit_at = [&](std::size_t i) -> std::optional<TypoEdit> {
    Rng edit_rng(derive_seed(stream, "edit", i));
    auto e = random_word_edit(words[i].text, edit_rng, model);
    if (!e) return std::nullopt;
    return TypoEdit{i, words[i].text, std::move(e->typoed), e->kind};
  };

  std::vector<TypoEdit> edits;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!is_eligible[i] || !heads[i]) continue;
    if (auto e = edit_at(i)) edits.push_back(std::move(*e));
  }
  if (edits.empty() && options.ensure_edit && options.p > 0.0) {
    std::vector<std::size_t> order(eligible.begin(), eligible.end());
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    Rng fallback(derive_seed(stream, "fallback"));
    fallback.shuffle(order);
    for (auto i : order) {
      if (auto e = edit_at(i)) {
        edits.push_back(std::move(*e));
        break;
      }
    }
  }

  TypoedQuestion out{question.id, question.text, edits, edits.empty()};
  // Splice typoed words into the original text, right to left so earlier
  // offsets stay valid.
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    const auto& w = words[it->word_index];
    out.text.replace(w.begin, w.end - w.begin, it->typoed);
  }
  return out;
}

/// Convenience overload computing eligibility from the setting.
inline TypoedQuestion perturb_question(const Question& question, TypoSetting setting,
                                       const PerturbOptions& options, Rng& rng,
                                       const TypoModel& model,
                                       std::span<const std::vector<std::string>> relevant = {}) {
  const auto words = word_strings(question.text);
  const auto eligible = eligible_indices(words, setting, relevant, model.stopwords);
  return perturb_question(question, eligible, options, rng, model);
}

// ---------------------------------------------------------------------------
// Test sets

using TypoedQuestionSet = std::vector<TypoedQuestion>;

/// Word lists of each question's relevant passages.
inline std::vector<std::vector<std::string>> relevant_passage_words(
    const Question& q, const RelevanceJudgments& qrels, const PassageCollection& passages) {
  std::vector<std::vector<std::string>> out;
  for (const auto& pid : qrels.relevant(q.id)) {
    out.push_back(word_strings(passages.at(pid).text));
  }
  return out;
}

/// One typoed variant per question. Randomness for each question derives
/// from (seed, question id), so the result does not depend on question
/// order. The discriminative setting needs qrels and passages.
inline TypoedQuestionSet build_typo_testset(const QuestionSet& questions, TypoSetting setting,
                                            double p, std::uint64_t seed,
                                            const TypoModel& model,
                                            const RelevanceJudgments* qrels = nullptr,
                                            const PassageCollection* passages = nullptr) {
  if (setting == TypoSetting::kDiscriminativeUtterances && (!qrels || !passages)) {
    throw PreconditionError("discriminative setting requires qrels and passages");
  }
  TypoedQuestionSet out;
  out.reserve(questions.size());
  for (const auto& q : questions) {
    std::vector<std::vector<std::string>> relevant;
    if (setting == TypoSetting::kDiscriminativeUtterances) {
      relevant = relevant_passage_words(q, *qrels, *passages);
    }
    const auto words = word_strings(q.text);
    std::vector<std::size_t> eligible;
    if (setting != TypoSetting::kDiscriminativeUtterances || !relevant.empty()) {
      eligible = eligible_indices(words, setting, relevant, model.stopwords);
    }
    Rng rng(derive_seed(seed, q.id));
    out.push_back(perturb_question(q, eligible, PerturbOptions{p, true}, rng, model));
  }
  return out;
}

inline nlohmann::json edits_to_json(const std::vector<TypoEdit>& edits) {
  auto arr = nlohmann::json::array();
  for (const auto& e : edits) {
    arr.push_back({{"index", e.word_index},
                   {"original", e.original},
                   {"typoed", e.typoed},
                   {"kind", std::string(to_string(e.kind))}});
  }
  return arr;
}

/// qid <TAB> typoed text <TAB> edits JSON. Flagged questions carry "[]".
inline std::string format_typo_testset(const TypoedQuestionSet& set) {
  std::string out;
  for (const auto& t : set) {
    detail::check_field(t.text, "typoed text");
    out += t.base_question_id + "\t" + t.text + "\t" + edits_to_json(t.edits).dump() + "\n";
  }
  return out;
}

inline TypoedQuestionSet parse_typo_testset(std::string_view content,
                                            const std::string& path = "<typo_questions>") {
  TypoedQuestionSet out;
  detail::for_each_record(content, path, [&](std::size_t, const auto& f) {
    if (f.size() != 3) throw DataError("expected qid, text, edits");
    TypoedQuestion t{std::string(f[0]), std::string(f[1]), {}, false};
    nlohmann::json arr;
    try {
      arr = nlohmann::json::parse(f[2]);
      for (const auto& e : arr) {
        t.edits.push_back({e.at("index").get<std::size_t>(), e.at("original").get<std::string>(),
                           e.at("typoed").get<std::string>(),
                           parse_typo_kind(e.at("kind").get<std::string>())});
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("bad edits JSON: ") + e.what());
    }
    t.flagged = t.edits.empty();
    out.push_back(std::move(t));
  });
  return out;
}

inline void write_typo_testset(const std::string& path, const TypoedQuestionSet& set) {
  write_file(path, format_typo_testset(set));
}

inline TypoedQuestionSet load_typo_testset(const std::string& path) {
  return parse_typo_testset(read_file(path), path);
}

}  // namespace robustdr
