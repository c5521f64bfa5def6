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

// Dual encoder: two independent towers, each a mean-pooled embedding bag
// followed by one affine projection. Scores are raw inner products.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robustdr/common.hpp"
#include "robustdr/textproc.hpp"

namespace robustdr {

using Embedding = std::vector<double>;

struct TowerParams {
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
  std::vector<double> embeddings;  // vocab_size x dim, row-major
  std::vector<double> projection;  // dim x dim, row-major; out = P * pooled + b
  std::vector<double> bias;        // dim

  TowerParams() = default;
  TowerParams(std::size_t v, std::size_t d)
      : vocab_size(v), dim(d), embeddings(v * d, 0.0), projection(d * d, 0.0), bias(d, 0.0) {}

  std::span<const double> row(TokenId id) const {
    return {embeddings.data() + static_cast<std::size_t>(id) * dim, dim};
  }
  std::span<double> row(TokenId id) {
    return {embeddings.data() + static_cast<std::size_t>(id) * dim, dim};
  }

  bool operator==(const TowerParams&) const = default;
};

struct ModelParams {
  std::size_t dim = 0;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  TowerParams question;
  TowerParams passage;

  ModelParams() = default;
  ModelParams(std::size_t v, std::size_t d)
      : dim(d), vocab_size(v), question(v, d), passage(v, d) {}

  /// Applies fn to each (param, other.param) array pair; used for optimizer
  /// state and gradient buffers that mirror the parameter layout.
  template <typename Other, typename Fn>
  void zip(Other& other, Fn&& fn) {
    fn(question.embeddings, other.question.embeddings);
    fn(question.projection, other.question.projection);
    fn(question.bias, other.question.bias);
    fn(passage.embeddings, other.passage.embeddings);
    fn(passage.projection, other.passage.projection);
    fn(passage.bias, other.passage.bias);
  }

  bool operator==(const ModelParams&) const = default;
};

struct EncoderConfig {
  std::size_t dim = 128;
  std::size_t vocab_size = 0;
  /// Half-width of the uniform noise added to the identity projection.
  double projection_noise = 0.01;
};

inline void init_tower(TowerParams& t, const EncoderConfig& config, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(config.dim));
  for (auto& x : t.embeddings) x = rng.uniform(-bound, bound);
  for (std::size_t i = 0; i < config.dim; ++i) {
    for (std::size_t j = 0; j < config.dim; ++j) {
      const double noise = config.projection_noise == 0.0
                               ? 0.0
                               : rng.uniform(-config.projection_noise, config.projection_noise);
      t.projection[i * config.dim + j] = (i == j ? 1.0 : 0.0) + noise;
    }
  }
}

/// Embeddings uniform in [-1/sqrt(d), 1/sqrt(d)], projection = identity plus
/// small uniform noise, zero bias. The question tower is drawn first.
inline ModelParams init_params(const EncoderConfig& config, std::uint64_t seed) {
  if (config.dim < 1) throw PreconditionError("embedding dimension must be >= 1");
  if (config.vocab_size < 2) throw PreconditionError("vocabulary must hold the reserved tokens");
  ModelParams m(config.vocab_size, config.dim);
  m.seed = seed;
  Rng rng(seed);
  init_tower(m.question, config, rng);
  init_tower(m.passage, config, rng);
  return m;
}

/// Mean of the non-[PAD] token embeddings; returns the count used.
inline std::size_t mean_pool(const TowerParams& tower, std::span<const TokenId> ids,
                             std::span<double> pooled) {
  std::fill(pooled.begin(), pooled.end(), 0.0);
  std::size_t n = 0;
  for (TokenId id : ids) {
    if (id == Vocabulary::kPad) continue;
    if (id < 0 || static_cast<std::size_t>(id) >= tower.vocab_size) {
      throw PreconditionError("token id " + std::to_string(id) + " out of range");
    }
    const auto r = tower.row(id);
    for (std::size_t k = 0; k < tower.dim; ++k) pooled[k] += r[k];
    ++n;
  }
  if (n == 0) throw PreconditionError("encode: empty token sequence");
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& x : pooled) x *= inv;
  return n;
}

inline void project(const TowerParams& tower, std::span<const double> pooled,
                    std::span<double> out) {
  const std::size_t d = tower.dim;
  for (std::size_t i = 0; i < d; ++i) {
    const double* prow = tower.projection.data() + i * d;
    double acc = tower.bias[i];
    for (std::size_t j = 0; j < d; ++j) acc += prow[j] * pooled[j];
    out[i] = acc;
  }
}

/// Mean-pools the token embeddings ([PAD] excluded) and applies the tower's
/// affine projection.
inline Embedding encode(const TowerParams& tower, std::span<const TokenId> ids) {
  std::vector<double> pooled(tower.dim);
  mean_pool(tower, ids, pooled);
  Embedding out(tower.dim);
  project(tower, pooled, out);
  return out;
}

inline double sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("sim: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// ---------------------------------------------------------------------------
// Checkpoints
//
// Layout (all integers and reals little-endian):
//   char[8]  magic "RDRCKPT1"
//   u64      dim
//   u64      vocab_size
//   u64      seed
//   u64      config_hash
//   f64[]    question tower: embeddings, projection, bias
//   f64[]    passage tower:  embeddings, projection, bias

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void expect_end() const {
    if (pos_ != bytes_.size()) throw DataError(what_ + ": trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw DataError(what_ + ": truncated");
  }
  std::string_view bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

inline void put_tower(std::string& out, const TowerParams& t) {
  for (double x : t.embeddings) put_f64(out, x);
  for (double x : t.projection) put_f64(out, x);
  for (double x : t.bias) put_f64(out, x);
}

inline void read_tower(ByteReader& in, TowerParams& t) {
  for (auto& x : t.embeddings) x = in.f64();
  for (auto& x : t.projection) x = in.f64();
  for (auto& x : t.bias) x = in.f64();
}

inline constexpr std::string_view kCheckpointMagic = "RDRCKPT1";

}  // namespace detail

inline std::string serialize_checkpoint(const ModelParams& m) {
  std::string out(detail::kCheckpointMagic);
  detail::put_u64(out, m.dim);
  detail::put_u64(out, m.vocab_size);
  detail::put_u64(out, m.seed);
  detail::put_u64(out, m.config_hash);
  detail::put_tower(out, m.question);
  detail::put_tower(out, m.passage);
  return out;
}

inline ModelParams deserialize_checkpoint(std::string_view bytes) {
  detail::ByteReader in(bytes, "checkpoint");
  if (in.raw(8) != detail::kCheckpointMagic) throw DataError("checkpoint: bad magic");
  const auto dim = in.u64();
  const auto vocab = in.u64();
  if (dim == 0 || vocab < 2 || dim > (1u << 16) || vocab > (1u << 24)) {
    throw DataError("checkpoint: implausible shape");
  }
  ModelParams m(vocab, dim);
  m.seed = in.u64();
  m.config_hash = in.u64();
  detail::read_tower(in, m.question);
  detail::read_tower(in, m.passage);
  in.expect_end();
  return m;
}

inline void save_checkpoint(const std::string& path, const ModelParams& m) {
  write_file(path, serialize_checkpoint(m));
}

inline ModelParams load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(read_file(path));
}

/// Content hash of a model, recorded in indexes to detect staleness.
inline std::uint64_t model_hash(const ModelParams& m) {
  return sha256_u64(serialize_checkpoint(m));
}

/// Human-readable dump for debugging.
inline std::string export_text(const ModelParams& m) {
  std::string out = "dim " + std::to_string(m.dim) + "\nvocab_size " +
                    std::to_string(m.vocab_size) + "\nseed " + std::to_string(m.seed) +
                    "\nconfig_hash " + std::to_string(m.config_hash) + "\n";
  auto dump = [&](std::string_view name, const std::vector<double>& v, std::size_t cols) {
    out += std::string(name) + "\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      out += format_double(v[i]);
      out += ((i + 1) % cols == 0) ? "\n" : " ";
    }
  };
  for (auto [label, t] : {std::pair{"question", &m.question}, std::pair{"passage", &m.passage}}) {
    dump(std::string(label) + ".embeddings", t->embeddings, m.dim);
    dump(std::string(label) + ".projection", t->projection, m.dim);
    dump(std::string(label) + ".bias", t->bias, m.dim);
  }
  return out;
}

inline bool all_finite(const ModelParams& m) {
  auto ok = [](const std::vector<double>& v) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  return ok(m.question.embeddings) && ok(m.question.projection) && ok(m.question.bias) &&
         ok(m.passage.embeddings) && ok(m.passage.projection) && ok(m.passage.bias);
}

}  // namespace robustdr
