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

// Dense passage index and exact maximum inner product search.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robustdr/common.hpp"
#include "robustdr/corpus.hpp"
#include "robustdr/encoder.hpp"
#include "robustdr/textproc.hpp"

namespace robustdr {

struct DenseIndex {
  std::size_t dim = 0;
  std::uint64_t model_hash = 0;
  std::vector<std::string> ids;  // row i <-> ids[i]
  std::vector<double> matrix;    // ids.size() x dim, row-major

  std::size_t size() const { return ids.size(); }
  std::span<const double> row(std::size_t i) const { return {matrix.data() + i * dim, dim}; }

  bool operator==(const DenseIndex&) const = default;
};

/// Encodes every passage with the passage tower.
inline DenseIndex build_index(const PassageCollection& passages, const ModelParams& params,
                              const Vocabulary& vocab) {
  if (passages.empty()) throw DataError("build_index: passage collection is empty");
  if (vocab.size() != params.vocab_size) {
    throw DataError("build_index: vocabulary size " + std::to_string(vocab.size()) +
                    " does not match the model (" + std::to_string(params.vocab_size) + ")");
  }
  DenseIndex index;
  index.dim = params.dim;
  index.model_hash = model_hash(params);
  index.ids.reserve(passages.size());
  index.matrix.reserve(passages.size() * params.dim);
  for (const auto& p : passages) {
    const auto e = encode(params.passage, query_ids(p.text, vocab));
    index.ids.push_back(p.id);
    index.matrix.insert(index.matrix.end(), e.begin(), e.end());
  }
  return index;
}

struct ScoredPassage {
  std::size_t index;  // row in the DenseIndex
  double score;

  bool operator==(const ScoredPassage&) const = default;
};

/// Ranking order: higher score first, then lower row index.
inline bool ranks_before(const ScoredPassage& a, const ScoredPassage& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.index < b.index;
}

/// Exact top-k by inner product in one scan over the rows, keeping a bounded
/// heap of the best k seen so far. Returns min(k, |P|) results.
inline std::vector<ScoredPassage> search(const DenseIndex& index, std::span<const double> q_emb,
                                         std::size_t k) {
  if (k == 0) throw PreconditionError("search: k must be >= 1");
  if (q_emb.size() != index.dim) throw PreconditionError("search: dimension mismatch");
  // Heap top is the worst retained entry.
  auto worse_on_top = [](const ScoredPassage& a, const ScoredPassage& b) {
    return ranks_before(a, b);
  };
  std::priority_queue<ScoredPassage, std::vector<ScoredPassage>, decltype(worse_on_top)> heap(
      worse_on_top);
  for (std::size_t i = 0; i < index.size(); ++i) {
    ScoredPassage cand{i, sim(q_emb, index.row(i))};
    if (heap.size() < k) {
      heap.push(cand);
    } else if (ranks_before(cand, heap.top())) {
      heap.pop();
      heap.push(cand);
    }
  }
  std::vector<ScoredPassage> out(heap.size());
  for (std::size_t i = out.size(); i > 0; --i) {
    out[i - 1] = heap.top();
    heap.pop();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runs

struct RankedEntry {
  std::string passage_id;
  double score;
};

/// question id -> ranked list, best first.
using RunResult = std::map<std::string, std::vector<RankedEntry>>;

/// Encodes each (qid, text) query with the question tower and searches.
inline RunResult run_queries(const DenseIndex& index, const ModelParams& params,
                             const Vocabulary& vocab,
                             std::span<const std::pair<std::string, std::string>> queries,
                             std::size_t k) {
  if (index.model_hash != model_hash(params)) {
    throw DataError("index was built from a different model checkpoint");
  }
  RunResult run;
  for (const auto& [qid, text] : queries) {
    const auto q = encode(params.question, query_ids(text, vocab));
    auto& list = run[qid];
    for (const auto& hit : search(index, q, k)) {
      list.push_back({index.ids[hit.index], hit.score});
    }
  }
  return run;
}

/// qid <TAB> passage-id <TAB> rank <TAB> score <TAB> tag, ranks from 1.
inline std::string format_run(const RunResult& run, std::string_view tag) {
  std::string out;
  for (const auto& [qid, list] : run) {
    for (std::size_t r = 0; r < list.size(); ++r) {
      out += qid + "\t" + list[r].passage_id + "\t" + std::to_string(r + 1) + "\t" +
             format_double(list[r].score) + "\t" + std::string(tag) + "\n";
    }
  }
  return out;
}

inline RunResult parse_run(std::string_view content, const std::string& path = "<run>") {
  RunResult run;
  detail::for_each_record(content, path, [&](std::size_t, const auto& f) {
    if (f.size() != 5) throw DataError("expected qid, passage-id, rank, score, tag");
    auto& list = run[std::string(f[0])];
    std::size_t rank = 0;
    double score = 0.0;
    try {
      rank = std::stoul(std::string(f[2]));
      score = std::stod(std::string(f[3]));
    } catch (const std::exception&) {
      throw DataError("bad rank or score");
    }
    if (rank != list.size() + 1) throw DataError("ranks must be consecutive from 1");
    list.push_back({std::string(f[1]), score});
  });
  return run;
}

inline void write_run(const std::string& path, const RunResult& run, std::string_view tag) {
  write_file(path, format_run(run, tag));
}

inline RunResult load_run(const std::string& path) { return parse_run(read_file(path), path); }

// ---------------------------------------------------------------------------
// Index file
//
//   char[8]  magic "RDRINDX1"
//   u64      number of passages
//   u64      dim
//   u64      model hash
//   per passage: u64 id length, id bytes
//   f64[]    rows, row-major, little-endian

inline std::string serialize_index(const DenseIndex& index) {
  std::string out("RDRINDX1");
  detail::put_u64(out, index.size());
  detail::put_u64(out, index.dim);
  detail::put_u64(out, index.model_hash);
  for (const auto& id : index.ids) {
    detail::put_u64(out, id.size());
    out += id;
  }
  for (double x : index.matrix) detail::put_f64(out, x);
  return out;
}

inline DenseIndex deserialize_index(std::string_view bytes) {
  detail::ByteReader in(bytes, "index");
  if (in.raw(8) != "RDRINDX1") throw DataError("index: bad magic");
  DenseIndex index;
  const auto n = in.u64();
  index.dim = in.u64();
  index.model_hash = in.u64();
  if (index.dim == 0 || n > bytes.size()) throw DataError("index: implausible shape");
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = in.u64();
    if (len > bytes.size()) throw DataError("index: implausible id length");
    index.ids.emplace_back(in.raw(len));
  }
  index.matrix.resize(n * index.dim);
  for (auto& x : index.matrix) x = in.f64();
  in.expect_end();
  return index;
}

inline void save_index(const std::string& path, const DenseIndex& index) {
  write_file(path, serialize_index(index));
}

inline DenseIndex load_index(const std::string& path) {
  return deserialize_index(read_file(path));
}

}  // namespace robustdr
