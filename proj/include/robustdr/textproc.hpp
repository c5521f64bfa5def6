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

// Word segmentation, subword vocabulary and tokenizer, IDF statistics and the
// stopword list.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "robustdr/common.hpp"
#include "robustdr/corpus.hpp"

namespace robustdr {

struct Word {
  std::string text;    // lowercased
  std::size_t begin;   // byte offsets into the source text
  std::size_t end;
};

namespace detail {

inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

/// Byte length of the UTF-8 sequence starting with lead byte c (1 for
/// malformed bytes so iteration always advances).
inline std::size_t utf8_length(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xe) return 3;
  if ((c >> 3) == 0x1e) return 4;
  return 1;
}

inline std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t n = std::min(utf8_length(static_cast<unsigned char>(s[i])), s.size() - i);
    out.emplace_back(s.substr(i, n));
    i += n;
  }
  return out;
}

}  // namespace detail

/// Lowercased maximal runs of alphanumeric characters. Non-ASCII bytes count
/// as word characters; everything else separates words.
inline std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!detail::is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    std::string w;
    while (i < text.size() && detail::is_word_byte(static_cast<unsigned char>(text[i]))) {
      w.push_back(detail::ascii_lower(text[i]));
      ++i;
    }
    words.push_back({std::move(w), start, i});
  }
  return words;
}

inline std::vector<std::string> word_strings(std::string_view text) {
  std::vector<std::string> out;
  for (auto& w : split_words(text)) out.push_back(std::move(w.text));
  return out;
}

inline std::string join_words(std::span<const std::string> words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stopwords

/// English stopword list (the NLTK list). Also shipped as data/stopwords.txt.
inline constexpr std::string_view kDefaultStopwords =
    "i\nme\nmy\nmyself\nwe\nour\nours\nourselves\nyou\nyou're\nyou've\nyou'll\n"
    "you'd\nyour\nyours\nyourself\nyourselves\nhe\nhim\nhis\nhimself\nshe\nshe's\n"
    "her\nhers\nherself\nit\nit's\nits\nitself\nthey\nthem\ntheir\ntheirs\n"
    "themselves\nwhat\nwhich\nwho\nwhom\nthis\nthat\nthat'll\nthese\nthose\nam\nis\n"
    "are\nwas\nwere\nbe\nbeen\nbeing\nhave\nhas\nhad\nhaving\ndo\ndoes\ndid\ndoing\n"
    "a\nan\nthe\nand\nbut\nif\nor\nbecause\nas\nuntil\nwhile\nof\nat\nby\nfor\nwith\n"
    "about\nagainst\nbetween\ninto\nthrough\nduring\nbefore\nafter\nabove\nbelow\nto\n"
    "from\nup\ndown\nin\nout\non\noff\nover\nunder\nagain\nfurther\nthen\nonce\nhere\n"
    "there\nwhen\nwhere\nwhy\nhow\nall\nany\nboth\neach\nfew\nmore\nmost\nother\nsome\n"
    "such\nno\nnor\nnot\nonly\nown\nsame\nso\nthan\ntoo\nvery\ns\nt\ncan\nwill\njust\n"
    "don\ndon't\nshould\nshould've\nnow\nd\nll\nm\no\nre\nve\ny\nain\naren\naren't\n"
    "couldn\ncouldn't\ndidn\ndidn't\ndoesn\ndoesn't\nhadn\nhadn't\nhasn\nhasn't\n"
    "haven\nhaven't\nisn\nisn't\nma\nmightn\nmightn't\nmustn\nmustn't\nneedn\n"
    "needn't\nshan\nshan't\nshouldn\nshouldn't\nwasn\nwasn't\nweren\nweren't\nwon\n"
    "won't\nwouldn\nwouldn't\n";

class StopwordList {
 public:
  StopwordList() : StopwordList(parse(kDefaultStopwords)) {}
  explicit StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  static StopwordList from_file(const std::string& path) {
    return StopwordList(parse(read_file(path)));
  }

  /// Expects a lowercased word.
  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  static std::unordered_set<std::string> parse(std::string_view content) {
    std::unordered_set<std::string> out;
    std::size_t pos = 0;
    while (pos < content.size()) {
      std::size_t nl = content.find('\n', pos);
      if (nl == std::string_view::npos) nl = content.size();
      std::string_view line = content.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) {
        std::string w(line);
        for (auto& c : w) c = detail::ascii_lower(c);
        out.insert(std::move(w));
      }
      pos = nl + 1;
    }
    return out;
  }

  std::unordered_set<std::string> words_;
};

inline const StopwordList& default_stopwords() {
  static const StopwordList list;
  return list;
}

inline bool is_stopword(std::string_view word) { return default_stopwords().contains(word); }

// ---------------------------------------------------------------------------
// Vocabulary

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kContinuation = "##";

using TokenId = std::int32_t;

/// Ordered subword inventory. Word-initial pieces are bare, continuation
/// pieces carry a "##" prefix. [PAD] is id 0 and [UNK] is id 1.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;

  Vocabulary() { add(std::string(kPadToken)); add(std::string(kUnkToken)); }

  /// Returns the id of `piece`, adding it if absent.
  TokenId add(const std::string& piece) {
    if (piece.empty()) throw PreconditionError("empty vocabulary piece");
    auto [it, inserted] = ids_.emplace(piece, static_cast<TokenId>(tokens_.size()));
    if (inserted) {
      tokens_.push_back(piece);
      max_piece_bytes_ = std::max(max_piece_bytes_, piece.size());
    }
    return it->second;
  }

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t max_piece_bytes() const { return max_piece_bytes_; }

  std::optional<TokenId> find(std::string_view piece) const {
    auto it = ids_.find(std::string(piece));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view piece) const { return find(piece).has_value(); }

  /// One piece per line, line number = id.
  std::string to_text() const {
    std::string out;
    for (const auto& t : tokens_) out += t + "\n";
    return out;
  }

  static Vocabulary from_text(std::string_view content) {
    Vocabulary v;
    v.tokens_.clear();
    v.ids_.clear();
    v.max_piece_bytes_ = 0;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
      std::size_t nl = content.find('\n', pos);
      if (nl == std::string_view::npos) nl = content.size();
      std::string_view line = content.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) throw DataError("vocab line " + std::to_string(line_no) + " is empty");
      if (v.contains(line)) {
        throw DataError("vocab line " + std::to_string(line_no) + ": duplicate piece " +
                        std::string(line));
      }
      v.add(std::string(line));
    }
    if (v.size() < 2 || v.tokens_[kPad] != kPadToken || v.tokens_[kUnk] != kUnkToken) {
      throw DataError("vocab must start with [PAD] and [UNK]");
    }
    return v;
  }

  static Vocabulary load(const std::string& path) { return from_text(read_file(path)); }
  void save(const std::string& path) const { write_file(path, to_text()); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  std::size_t max_piece_bytes_ = 0;
};

namespace detail {

/// Visible ASCII characters plus any other code points seen in the corpus,
/// sorted bytewise.
inline std::vector<std::string> base_alphabet(const std::map<std::string, std::int64_t>& counts) {
  std::set<std::string> chars;
  for (int c = 0x21; c <= 0x7e; ++c) chars.insert(std::string(1, static_cast<char>(c)));
  for (const auto& [word, n] : counts) {
    for (auto& ch : utf8_chars(word)) chars.insert(std::move(ch));
  }
  return {chars.begin(), chars.end()};
}

inline std::string strip_continuation(const std::string& piece) {
  return piece.rfind(kContinuation, 0) == 0 ? piece.substr(kContinuation.size()) : piece;
}

}  // namespace detail

/// Size of the merge-free vocabulary for a corpus: reserved tokens plus an
/// initial and a continuation piece per base character.
inline std::size_t base_vocab_size(const std::map<std::string, std::int64_t>& word_counts) {
  return 2 + 2 * detail::base_alphabet(word_counts).size();
}

/// Builds a vocabulary from word frequencies. Starts from single characters
/// and repeatedly merges the most frequent adjacent pair (ties go to the
/// lexicographically smaller pair) until `target_size` pieces exist or no
/// pair is left.
inline Vocabulary build_vocab(const std::map<std::string, std::int64_t>& word_counts,
                              std::size_t target_size) {
  if (word_counts.empty()) throw DataError("build_vocab: corpus is empty");
  const auto alphabet = detail::base_alphabet(word_counts);
  const std::size_t base = 2 + 2 * alphabet.size();
  if (target_size < base) {
    throw PreconditionError("build_vocab: target size " + std::to_string(target_size) +
                            " is below the base size " + std::to_string(base));
  }
  Vocabulary vocab;
  for (const auto& c : alphabet) vocab.add(c);
  for (const auto& c : alphabet) vocab.add(std::string(kContinuation) + c);

  struct Entry {
    std::vector<TokenId> pieces;
    std::int64_t count;
  };
  std::vector<Entry> words;
  words.reserve(word_counts.size());
  for (const auto& [w, n] : word_counts) {
    Entry e{{}, n};
    bool first = true;
    for (const auto& ch : detail::utf8_chars(w)) {
      e.pieces.push_back(*vocab.find(first ? ch : std::string(kContinuation) + ch));
      first = false;
    }
    words.push_back(std::move(e));
  }

  auto key = [](TokenId a, TokenId b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
  auto count_pairs = [&](const Entry& e, std::int64_t sign) {
    for (std::size_t i = 0; i + 1 < e.pieces.size(); ++i) {
      auto& c = pair_counts[key(e.pieces[i], e.pieces[i + 1])];
      c += sign * e.count;
    }
  };
  for (const auto& e : words) count_pairs(e, +1);

  while (vocab.size() < target_size) {
    std::uint64_t best = 0;
    std::int64_t best_count = 0;
    for (const auto& [k, c] : pair_counts) {
      if (c <= 0) continue;
      bool better = c > best_count;
      if (!better && c == best_count) {
        const auto& ba = vocab.token(static_cast<TokenId>(best >> 32));
        const auto& bb = vocab.token(static_cast<TokenId>(best & 0xffffffffu));
        const auto& ka = vocab.token(static_cast<TokenId>(k >> 32));
        const auto& kb = vocab.token(static_cast<TokenId>(k & 0xffffffffu));
        better = std::tie(ka, kb) < std::tie(ba, bb);
      }
      if (better) {
        best = k;
        best_count = c;
      }
    }
    if (best_count == 0) break;
    const TokenId a = static_cast<TokenId>(best >> 32);
    const TokenId b = static_cast<TokenId>(best & 0xffffffffu);
    const TokenId merged = vocab.add(vocab.token(a) + detail::strip_continuation(vocab.token(b)));
    for (auto& e : words) {
      bool has = false;
      for (std::size_t i = 0; i + 1 < e.pieces.size() && !has; ++i) {
        has = e.pieces[i] == a && e.pieces[i + 1] == b;
      }
      if (!has) continue;
      count_pairs(e, -1);
      std::vector<TokenId> next;
      next.reserve(e.pieces.size());
      for (std::size_t i = 0; i < e.pieces.size(); ++i) {
        if (i + 1 < e.pieces.size() && e.pieces[i] == a && e.pieces[i + 1] == b) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(e.pieces[i]);
        }
      }
      e.pieces = std::move(next);
      count_pairs(e, +1);
    }
    pair_counts.erase(best);
  }
  return vocab;
}

/// Word frequencies over passages and questions, as consumed by build_vocab.
inline std::map<std::string, std::int64_t> corpus_word_counts(
    const PassageCollection& passages, std::span<const QuestionSet* const> question_sets) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& p : passages) {
    for (auto& w : split_words(p.text)) ++counts[w.text];
  }
  for (const auto* qs : question_sets) {
    for (const auto& q : *qs) {
      for (auto& w : split_words(q.text)) ++counts[w.text];
    }
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Tokenization

struct TokenSequence {
  std::vector<TokenId> ids;
  /// [begin, end) token positions produced by each source word.
  std::vector<std::pair<std::size_t, std::size_t>> word_spans;
};

/// Greedy longest-prefix segmentation of one word. The first piece comes from
/// the word-initial inventory and the rest from the "##" inventory; if any
/// position cannot be matched the whole word becomes a single [UNK].
inline std::vector<TokenId> tokenize(std::string_view word, const Vocabulary& vocab) {
  if (word.empty()) throw PreconditionError("tokenize: empty word");
  // Code point boundaries, so pieces never split a UTF-8 sequence.
  std::vector<std::size_t> bounds{0};
  for (std::size_t i = 0; i < word.size();) {
    i += std::min(detail::utf8_length(static_cast<unsigned char>(word[i])), word.size() - i);
    bounds.push_back(i);
  }
  std::vector<TokenId> out;
  std::string candidate;
  std::size_t start = 0;  // index into bounds
  while (start + 1 < bounds.size()) {
    std::optional<TokenId> match;
    std::size_t end = bounds.size() - 1;
    for (; end > start; --end) {
      const std::size_t len = bounds[end] - bounds[start];
      if (len > vocab.max_piece_bytes()) continue;
      candidate.assign(start == 0 ? "" : kContinuation);
      candidate.append(word.substr(bounds[start], len));
      match = vocab.find(candidate);
      if (match) break;
    }
    if (!match) return {Vocabulary::kUnk};
    out.push_back(*match);
    start = end;
  }
  return out;
}

inline TokenSequence tokenize_words(std::span<const std::string> words, const Vocabulary& vocab) {
  TokenSequence seq;
  for (const auto& w : words) {
    const std::size_t begin = seq.ids.size();
    auto ids = tokenize(w, vocab);
    seq.ids.insert(seq.ids.end(), ids.begin(), ids.end());
    seq.word_spans.emplace_back(begin, seq.ids.size());
  }
  return seq;
}

inline TokenSequence tokenize_text(std::string_view text, const Vocabulary& vocab) {
  const auto words = word_strings(text);
  return tokenize_words(words, vocab);
}

/// Token ids for a query; text without any word encodes as a single [UNK].
inline std::vector<TokenId> query_ids(std::string_view text, const Vocabulary& vocab) {
  auto seq = tokenize_text(text, vocab);
  if (seq.ids.empty()) return {Vocabulary::kUnk};
  return std::move(seq.ids);
}

// ---------------------------------------------------------------------------
// IDF

/// Document frequencies of words over a passage collection.
class IdfTable {
 public:
  IdfTable() = default;

  static IdfTable build(const PassageCollection& passages) {
    IdfTable t;
    t.num_docs_ = passages.size();
    for (const auto& p : passages) {
      std::unordered_set<std::string> seen;
      for (auto& w : split_words(p.text)) seen.insert(std::move(w.text));
      for (const auto& w : seen) ++t.df_[w];
    }
    return t;
  }

  std::size_t num_docs() const { return num_docs_; }

  std::size_t df(std::string_view term) const {
    auto it = df_.find(std::string(term));
    return it == df_.end() ? 0 : it->second;
  }

  /// Test hook: set counts directly.
  void set(std::size_t num_docs, std::unordered_map<std::string, std::size_t> df) {
    num_docs_ = num_docs;
    df_ = std::move(df);
  }

 private:
  std::size_t num_docs_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

/// Smoothed inverse document frequency ln((1 + N) / (1 + df)).
inline double idf(std::string_view term, const IdfTable& table) {
  const double n = static_cast<double>(table.num_docs());
  const double df = static_cast<double>(table.df(term));
  return std::log((1.0 + n) / (1.0 + df));
}

/// IDF of each word divided by the question's IDF sum. Falls back to a
/// uniform 1/|words| when the sum is zero.
inline std::vector<double> relative_importances(std::span<const std::string> words,
                                                const IdfTable& table) {
  std::vector<double> out(words.size(), 0.0);
  if (words.empty()) return out;
  double total = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    out[i] = idf(words[i], table);
    total += out[i];
  }
  for (auto& v : out) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(words.size());
  return out;
}

inline double relative_importance(std::string_view word, std::span<const std::string> question,
                                  const IdfTable& table) {
  if (question.empty()) throw PreconditionError("relative_importance: empty question");
  double total = 0.0;
  for (const auto& w : question) total += idf(w, table);
  if (total <= 0.0) return 1.0 / static_cast<double>(question.size());
  return idf(word, table) / total;
}

}  // namespace robustdr
