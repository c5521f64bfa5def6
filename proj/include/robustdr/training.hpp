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

// Training objectives for the dual encoder and the optimisation loop.
//
// All three losses are softmax cross-entropies over raw inner products:
//   L1  question vs. its positive passage, other batch passages as negatives
//   L2  question vs. its typoed variant, other batch questions as negatives
//   L3  typoed variant vs. the positive passage, batch passages as negatives
// The four training modes combine them as
//   DR         w1*L1
//   DR_Aug     w1*L1, where a fair coin per question picks the original or
//              the typoed variant
//   DR_CL      w1*L1 + w2*L2
//   DR_Aug_CL  w1*L1 + w2*L2 + w3*L3
// averaged over the batch. Gradients are derived by hand through the
// softmax, the inner products, the projection, mean pooling and the
// embedding lookup.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "robustdr/common.hpp"
#include "robustdr/corpus.hpp"
#include "robustdr/encoder.hpp"
#include "robustdr/textproc.hpp"
#include "robustdr/typogen.hpp"

namespace robustdr {

enum class TrainMode { kDR, kDRAug, kDRCL, kDRAugCL };

inline constexpr std::array<TrainMode, 4> kAllTrainModes = {
    TrainMode::kDR, TrainMode::kDRAug, TrainMode::kDRCL, TrainMode::kDRAugCL};

inline std::string_view to_string(TrainMode m) {
  switch (m) {
    case TrainMode::kDR: return "DR";
    case TrainMode::kDRAug: return "DR_Aug";
    case TrainMode::kDRCL: return "DR_CL";
    case TrainMode::kDRAugCL: return "DR_Aug_CL";
  }
  return "?";
}

inline TrainMode parse_train_mode(std::string_view s) {
  for (auto m : kAllTrainModes) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown training mode '" + std::string(s) +
                    "' (expected DR, DR_Aug, DR_CL or DR_Aug_CL)");
}

inline bool needs_typos(TrainMode m) { return m != TrainMode::kDR; }

struct LossWeights {
  double w1 = 1.0;
  double w2 = 1.0;
  double w3 = 1.0;
};

/// Equal weighting as an average over the mode's active losses.
inline LossWeights default_weights(TrainMode m) {
  switch (m) {
    case TrainMode::kDR:
    case TrainMode::kDRAug: return {1.0, 0.0, 0.0};
    case TrainMode::kDRCL: return {0.5, 0.5, 0.0};
    case TrainMode::kDRAugCL: return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  }
  return {};
}

inline void check_weights(const LossWeights& w) {
  if (w.w1 < 0 || w.w2 < 0 || w.w3 < 0) throw ConfigError("loss weights must be nonnegative");
  if (w.w1 + w.w2 + w.w3 <= 0) throw ConfigError("at least one loss weight must be positive");
}

// ---------------------------------------------------------------------------
// Losses on scores

/// log(sum(exp(scores))) with max subtraction.
inline double log_sum_exp(std::span<const double> scores) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double s : scores) mx = std::max(mx, s);
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - mx);
  return mx + std::log(acc);
}

/// Negative log-likelihood of the positive among {pos} + negatives.
inline double loss_l1(double pos_score, std::span<const double> neg_scores) {
  std::vector<double> all;
  all.reserve(neg_scores.size() + 1);
  all.push_back(pos_score);
  all.insert(all.end(), neg_scores.begin(), neg_scores.end());
  // lse >= pos mathematically; clamp rounding noise.
  return std::max(0.0, log_sum_exp(all) - pos_score);
}

/// Pulls a question towards its typoed variant, away from other questions.
inline double loss_l2(std::span<const double> q_emb, std::span<const double> typo_emb,
                      std::span<const Embedding> other_q_embs) {
  if (other_q_embs.empty()) {
    throw PreconditionError("loss_l2 needs at least one other question (batch size >= 2)");
  }
  std::vector<double> negs;
  for (const auto& o : other_q_embs) negs.push_back(sim(q_emb, o));
  return loss_l1(sim(q_emb, typo_emb), negs);
}

/// L1 with the typoed question in place of the original.
inline double loss_l3(std::span<const double> typo_q_emb, std::span<const double> pos_passage_emb,
                      std::span<const Embedding> negative_passage_embs) {
  std::vector<double> negs;
  for (const auto& p : negative_passage_embs) negs.push_back(sim(typo_q_emb, p));
  return loss_l1(sim(typo_q_emb, pos_passage_emb), negs);
}

// ---------------------------------------------------------------------------
// Batch objective with gradients

struct TrainBatch {
  std::vector<std::vector<TokenId>> questions;
  std::vector<std::vector<TokenId>> passages;  // aligned positives
  std::vector<std::vector<TokenId>> typoed;    // aligned typoed questions, may be empty

  std::size_t size() const { return questions.size(); }
};

struct LossValue {
  double loss = 0.0;
  // Batch means of the individual losses (0 when inactive).
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
};

namespace detail {

/// Forward state of one encoded sequence, kept for backprop.
struct Encoded {
  std::vector<double> pooled;
  Embedding emb;
  std::size_t count = 0;
};

inline Encoded forward(const TowerParams& tower, std::span<const TokenId> ids) {
  Encoded e;
  e.pooled.assign(tower.dim, 0.0);
  e.count = mean_pool(tower, ids, e.pooled);
  e.emb.assign(tower.dim, 0.0);
  project(tower, e.pooled, e.emb);
  return e;
}

/// Accumulates d(loss)/d(params) given d(loss)/d(embedding).
inline void backward(const TowerParams& tower, std::span<const TokenId> ids, const Encoded& e,
                     std::span<const double> g_emb, TowerParams& grad) {
  const std::size_t d = tower.dim;
  std::vector<double> g_pooled(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double gi = g_emb[i];
    if (gi == 0.0) continue;
    grad.bias[i] += gi;
    double* gp = grad.projection.data() + i * d;
    const double* p = tower.projection.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      gp[j] += gi * e.pooled[j];
      g_pooled[j] += p[j] * gi;
    }
  }
  const double inv = 1.0 / static_cast<double>(e.count);
  for (TokenId id : ids) {
    if (id == Vocabulary::kPad) continue;
    auto row = grad.row(id);
    for (std::size_t k = 0; k < d; ++k) row[k] += g_pooled[k] * inv;
  }
}

/// Softmax cross-entropy for one row of scores. Adds scale*(softmax - onehot)
/// to `grad_scores` and returns the loss.
inline double softmax_xent(std::span<const double> scores, std::size_t target, double scale,
                           std::span<double> grad_scores) {
  const double lse = log_sum_exp(scores);
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const double p = std::exp(scores[j] - lse);
    grad_scores[j] += scale * (p - (j == target ? 1.0 : 0.0));
  }
  return std::max(0.0, lse - scores[target]);
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void zero(ModelParams& g) {
  for (auto* v : {&g.question.embeddings, &g.question.projection, &g.question.bias,
                  &g.passage.embeddings, &g.passage.projection, &g.passage.bias}) {
    std::fill(v->begin(), v->end(), 0.0);
  }
}

}  // namespace detail

/// Forward value and full analytic gradient of the mode's objective. `grad`
/// is resized/zeroed as needed. DR_Aug draws one fair coin per question from
/// `rng` (tails selects the typoed variant); other modes leave `rng` alone.
inline LossValue combined_loss(TrainMode mode, const TrainBatch& batch, const ModelParams& params,
                               const LossWeights& weights, Rng& rng, ModelParams& grad) {
  const std::size_t B = batch.size();
  if (B < 2) throw PreconditionError("batch size must be >= 2 for in-batch negatives");
  if (batch.passages.size() != B) throw PreconditionError("questions and passages misaligned");
  const bool typos = needs_typos(mode);
  if (typos && batch.typoed.size() != B) {
    throw PreconditionError(std::string("mode ") + std::string(to_string(mode)) +
                            " requires typoed question variants");
  }
  if (grad.dim != params.dim || grad.vocab_size != params.vocab_size) {
    grad = ModelParams(params.vocab_size, params.dim);
  } else {
    detail::zero(grad);
  }
  grad.dim = params.dim;
  grad.vocab_size = params.vocab_size;

  const std::size_t d = params.dim;
  std::vector<detail::Encoded> q(B), p(B), t;
  for (std::size_t i = 0; i < B; ++i) q[i] = detail::forward(params.question, batch.questions[i]);
  for (std::size_t i = 0; i < B; ++i) p[i] = detail::forward(params.passage, batch.passages[i]);
  if (typos) {
    t.resize(B);
    for (std::size_t i = 0; i < B; ++i) t[i] = detail::forward(params.question, batch.typoed[i]);
  }

  // Which encoding feeds L1 for each question.
  std::vector<bool> l1_uses_typo(B, false);
  if (mode == TrainMode::kDRAug) {
    for (std::size_t i = 0; i < B; ++i) l1_uses_typo[i] = rng.bernoulli(0.5);
  }

  const bool use_l2 = mode == TrainMode::kDRCL || mode == TrainMode::kDRAugCL;
  const bool use_l3 = mode == TrainMode::kDRAugCL;
  const double inv_b = 1.0 / static_cast<double>(B);

  std::vector<Embedding> gq(B, Embedding(d, 0.0)), gp(B, Embedding(d, 0.0));
  std::vector<Embedding> gt(typos ? B : 0, Embedding(d, 0.0));
  std::vector<double> scores(B), gscores(B);
  LossValue out;

  // L1: row i scores a_i . p_j over the batch, target i.
  for (std::size_t i = 0; i < B; ++i) {
    const bool ty = l1_uses_typo[i];
    const Embedding& a = ty ? t[i].emb : q[i].emb;
    for (std::size_t j = 0; j < B; ++j) scores[j] = sim(a, p[j].emb);
    std::fill(gscores.begin(), gscores.end(), 0.0);
    const double l = detail::softmax_xent(scores, i, weights.w1 * inv_b, gscores);
    out.l1 += l * inv_b;
    out.loss += weights.w1 * l * inv_b;
    Embedding& ga = ty ? gt[i] : gq[i];
    for (std::size_t j = 0; j < B; ++j) {
      detail::axpy(gscores[j], p[j].emb, ga);
      detail::axpy(gscores[j], a, gp[j]);
    }
  }

  // L2: row i scores [q_i . t_i, q_i . q_j (j != i)], target 0.
  if (use_l2) {
    std::vector<double> s2(B), g2(B);
    for (std::size_t i = 0; i < B; ++i) {
      s2[0] = sim(q[i].emb, t[i].emb);
      for (std::size_t j = 0, k = 1; j < B; ++j) {
        if (j != i) s2[k++] = sim(q[i].emb, q[j].emb);
      }
      std::fill(g2.begin(), g2.end(), 0.0);
      const double l = detail::softmax_xent(s2, 0, weights.w2 * inv_b, g2);
      out.l2 += l * inv_b;
      out.loss += weights.w2 * l * inv_b;
      detail::axpy(g2[0], t[i].emb, gq[i]);
      detail::axpy(g2[0], q[i].emb, gt[i]);
      for (std::size_t j = 0, k = 1; j < B; ++j) {
        if (j == i) continue;
        detail::axpy(g2[k], q[j].emb, gq[i]);
        detail::axpy(g2[k], q[i].emb, gq[j]);
        ++k;
      }
    }
  }

  // L3: row i scores t_i . p_j, target i.
  if (use_l3) {
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t j = 0; j < B; ++j) scores[j] = sim(t[i].emb, p[j].emb);
      std::fill(gscores.begin(), gscores.end(), 0.0);
      const double l = detail::softmax_xent(scores, i, weights.w3 * inv_b, gscores);
      out.l3 += l * inv_b;
      out.loss += weights.w3 * l * inv_b;
      for (std::size_t j = 0; j < B; ++j) {
        detail::axpy(gscores[j], p[j].emb, gt[i]);
        detail::axpy(gscores[j], t[i].emb, gp[j]);
      }
    }
  }

  for (std::size_t i = 0; i < B; ++i) {
    detail::backward(params.question, batch.questions[i], q[i], gq[i], grad.question);
    detail::backward(params.passage, batch.passages[i], p[i], gp[i], grad.passage);
    if (typos) detail::backward(params.question, batch.typoed[i], t[i], gt[i], grad.question);
  }
  return out;
}

struct LossAndGradient {
  LossValue value;
  ModelParams gradient;
};

inline LossAndGradient combined_loss(TrainMode mode, const TrainBatch& batch,
                                     const ModelParams& params, const LossWeights& weights,
                                     Rng& rng) {
  LossAndGradient out;
  out.value = combined_loss(mode, batch, params, weights, rng, out.gradient);
  return out;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double warmup_fraction = 0.1;
  /// Length of the linear schedule; 0 keeps the rate constant at lr.
  std::size_t total_steps = 0;
};

/// Linear warmup from 0 over warmup_fraction * total_steps, then linear decay
/// to 0 at total_steps.
inline double scheduled_lr(const AdamConfig& c, std::size_t step) {
  if (c.total_steps == 0) return c.lr;
  const auto warmup = static_cast<std::size_t>(c.warmup_fraction * static_cast<double>(c.total_steps));
  if (step < warmup) return c.lr * static_cast<double>(step) / static_cast<double>(warmup);
  if (step >= c.total_steps) return 0.0;
  return c.lr * static_cast<double>(c.total_steps - step) /
         static_cast<double>(c.total_steps - warmup);
}

struct OptimizerState {
  AdamConfig config;
  ModelParams m;
  ModelParams v;
  std::size_t step = 0;

  OptimizerState() = default;
  OptimizerState(const ModelParams& params, AdamConfig c)
      : config(c), m(params.vocab_size, params.dim), v(params.vocab_size, params.dim) {}
};

/// One bias-corrected Adam update at the scheduled rate; advances the step.
inline void adam_step(ModelParams& params, ModelParams& grads, OptimizerState& state) {
  if (state.m.dim != params.dim || state.m.vocab_size != params.vocab_size ||
      grads.dim != params.dim || grads.vocab_size != params.vocab_size) {
    throw PreconditionError("adam_step: shape mismatch");
  }
  const auto& c = state.config;
  const double lr = scheduled_lr(c, state.step);
  const double t = static_cast<double>(state.step + 1);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  auto update = [&](std::vector<double>& w, std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  };
  update(params.question.embeddings, grads.question.embeddings, state.m.question.embeddings,
         state.v.question.embeddings);
  update(params.question.projection, grads.question.projection, state.m.question.projection,
         state.v.question.projection);
  update(params.question.bias, grads.question.bias, state.m.question.bias, state.v.question.bias);
  update(params.passage.embeddings, grads.passage.embeddings, state.m.passage.embeddings,
         state.v.passage.embeddings);
  update(params.passage.projection, grads.passage.projection, state.m.passage.projection,
         state.v.passage.projection);
  update(params.passage.bias, grads.passage.bias, state.m.passage.bias, state.v.passage.bias);
  ++state.step;
}

// ---------------------------------------------------------------------------
// Training loop

struct TrainConfig {
  TrainMode mode = TrainMode::kDR;
  std::size_t batch_size = 16;
  std::size_t steps = 2000;
  double lr = 1e-3;
  double warmup = 0.1;
  std::optional<LossWeights> weights;  // default_weights(mode) when unset
  double typo_p = 0.2;
  std::uint64_t seed = 0;
  std::size_t dim = 128;
  double projection_noise = 0.01;
  /// Run the dev callback every this many steps (0 = only at the end).
  std::size_t eval_every = 0;
};

struct TrainLogEntry {
  std::size_t step;
  double loss;
  double lr;
  std::optional<double> dev_metric;
};

struct TrainResult {
  ModelParams params;
  std::vector<TrainLogEntry> log;
};

/// A training question with its positive passage.
struct TrainExample {
  Question question;
  std::vector<TokenId> question_ids;
  std::vector<TokenId> passage_ids;
};

/// Pairs each training question with its first judged relevant passage.
inline std::vector<TrainExample> make_train_examples(const QuestionSet& questions,
                                                     const RelevanceJudgments& qrels,
                                                     const PassageCollection& passages,
                                                     const Vocabulary& vocab) {
  std::vector<TrainExample> out;
  out.reserve(questions.size());
  for (const auto& q : questions) {
    const auto& rel = qrels.relevant(q.id);
    if (rel.empty()) throw DataError("training question " + q.id + " has no relevant passage");
    out.push_back({q, query_ids(q.text, vocab), query_ids(passages.at(rel.front()).text, vocab)});
  }
  return out;
}

using DevEvaluator = std::function<double(const ModelParams&)>;

/// Trains a fresh model. Each epoch visits the examples in an order shuffled
/// by a per-epoch seed; incomplete trailing batches are skipped. Typoed
/// variants are drawn fresh every step. Throws std::runtime_error if the
/// loss stops being finite.
inline TrainResult train(const TrainConfig& config, const std::vector<TrainExample>& examples,
                         std::size_t vocab_size, const TypoModel& typo_model,
                         const Vocabulary& vocab, const DevEvaluator& dev = {}) {
  if (config.batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (examples.size() < config.batch_size) {
    throw ConfigError("fewer training examples (" + std::to_string(examples.size()) +
                      ") than batch_size");
  }
  const LossWeights weights = config.weights.value_or(default_weights(config.mode));
  check_weights(weights);

  TrainResult result;
  result.params = init_params({config.dim, vocab_size, config.projection_noise},
                              derive_seed(config.seed, "init"));
  result.params.seed = config.seed;
  OptimizerState opt(result.params,
                     AdamConfig{config.lr, 0.9, 0.999, 1e-8, config.warmup, config.steps});
  ModelParams grad(vocab_size, config.dim);
  Rng coin_rng(derive_seed(config.seed, "coins"));
  Rng typo_rng(derive_seed(config.seed, "typos"));
  const bool typos = needs_typos(config.mode);
  const PerturbOptions perturb{config.typo_p, true};

  std::vector<std::size_t> order;
  std::size_t cursor = 0;
  std::size_t epoch = 0;
  auto next_batch_indices = [&]() {
    if (order.empty() || cursor + config.batch_size > order.size()) {
      order.resize(examples.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      Rng epoch_rng(derive_seed(config.seed, "epoch", epoch++));
      epoch_rng.shuffle(order);
      cursor = 0;
    }
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                 order.begin() + static_cast<std::ptrdiff_t>(cursor + config.batch_size));
    cursor += config.batch_size;
    return idx;
  };

  TrainBatch batch;
  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto idx = next_batch_indices();
    batch.questions.clear();
    batch.passages.clear();
    batch.typoed.clear();
    for (auto i : idx) {
      batch.questions.push_back(examples[i].question_ids);
      batch.passages.push_back(examples[i].passage_ids);
      if (typos) {
        auto tq = perturb_question(examples[i].question, TypoSetting::kRandomWords, perturb,
                                   typo_rng, typo_model);
        batch.typoed.push_back(query_ids(tq.text, vocab));
      }
    }
    const double lr = scheduled_lr(opt.config, opt.step);
    const LossValue value =
        combined_loss(config.mode, batch, result.params, weights, coin_rng, grad);
    if (!std::isfinite(value.loss)) {
      throw std::runtime_error("training diverged: non-finite loss at step " +
                               std::to_string(step));
    }
    adam_step(result.params, grad, opt);

    TrainLogEntry entry{step, value.loss, lr, std::nullopt};
    const bool last = step + 1 == config.steps;
    if (dev && (last || (config.eval_every > 0 && (step + 1) % config.eval_every == 0))) {
      entry.dev_metric = dev(result.params);
    }
    result.log.push_back(entry);
  }
  return result;
}

/// step,loss,lr,dev_recall@10 with an empty last field when not evaluated.
inline std::string format_train_log(const std::vector<TrainLogEntry>& log) {
  std::string out = "step,loss,lr,dev_recall@10\n";
  for (const auto& e : log) {
    out += std::to_string(e.step) + "," + format_double(e.loss) + "," + format_double(e.lr) + ",";
    if (e.dev_metric) out += format_double(*e.dev_metric);
    out += "\n";
  }
  return out;
}

}  // namespace robustdr
