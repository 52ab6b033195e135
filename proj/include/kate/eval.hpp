// Copyright 2026 The KATE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KATE_EVAL_HPP
#define KATE_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "kate/corpus.hpp"
#include "kate/model.hpp"
#include "kate/numerics.hpp"
#include "kate/optim.hpp"

namespace kate {

// ---------------------------------------------------------------------------
// Topic distinctiveness

/// Root mean squared pairwise cosine among topic vectors (one per row).
/// 0 means mutually orthogonal topics, 1 means all collinear.
inline double mscd(const DenseMatrix& topics) {
  const std::size_t m = topics.rows();
  if (m < 2) throw Error("mscd needs at least two topics");
  std::vector<double> norms(m);
  for (std::size_t i = 0; i < m; ++i) {
    norms[i] = norm(topics.row(i));
    if (norms[i] == 0.0) throw Error("mscd: topic " + std::to_string(i) + " is a zero vector");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double cos = dot(topics.row(i), topics.row(j)) / (norms[i] * norms[j]);
      sum += cos * cos;
    }
  }
  const double mean = 2.0 * sum / (static_cast<double>(m) * static_cast<double>(m - 1));
  return std::sqrt(std::min(1.0, mean));
}

// ---------------------------------------------------------------------------
// Word-level views of the weight matrix

enum class WeightMode { signed_weight, absolute };

/// For every hidden neuron, the n words with the strongest connection.
inline std::vector<std::vector<std::string>> top_words(const ModelParams& params,
                                                       const Vocabulary& vocab, std::size_t n,
                                                       WeightMode mode = WeightMode::signed_weight) {
  if (vocab.size() != params.d()) throw Error("vocabulary mismatch");
  if (n > params.d()) throw Error("top_words: n exceeds vocabulary size");
  std::vector<std::vector<std::string>> topics(params.m());
  std::vector<std::size_t> order(params.d());
  for (std::size_t j = 0; j < params.m(); ++j) {
    const auto row = params.w.row(j);
    auto strength = [&](std::size_t i) {
      return mode == WeightMode::absolute ? std::abs(row[i]) : row[i];
    };
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double sa = strength(a), sb = strength(b);
                        return sa != sb ? sa > sb : a < b;
                      });
    for (std::size_t i = 0; i < n; ++i) topics[j].push_back(vocab[order[i]]);
  }
  return topics;
}

namespace detail {

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace detail

/// Vocabulary tokens closest to `query` by edit distance.
inline std::vector<std::string> closest_tokens(const Vocabulary& vocab, const std::string& query,
                                               std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> scored;
  scored.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    scored.emplace_back(detail::edit_distance(query, vocab[i]), i);
  }
  n = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(vocab[scored[i].second]);
  return out;
}

/// Nearest words by cosine between word embeddings, where a word's embedding
/// is its column of W (its weights to all m hidden neurons).
inline std::vector<std::string> word_neighbors(const ModelParams& params, const Vocabulary& vocab,
                                               const std::string& query, std::size_t n) {
  if (vocab.size() != params.d()) throw Error("vocabulary mismatch");
  const auto q = vocab.find(query);
  if (!q) {
    std::string msg = "word '" + query + "' is not in the vocabulary; closest matches:";
    for (const auto& t : closest_tokens(vocab, query, 5)) msg += " " + t;
    throw Error(msg);
  }
  const std::size_t d = params.d();
  const std::size_t m = params.m();
  DenseMatrix emb(d, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < d; ++i) emb(i, j) = params.w(j, i);
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (i == *q) continue;
    scored.emplace_back(cosine(emb.row(*q), emb.row(i)), i);
  }
  n = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(vocab[scored[i].second]);
  return out;
}

// ---------------------------------------------------------------------------
// Downstream heads trained on encoded training documents and scored on
// encoded test documents.

struct HeadConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 50;
  AdadeltaConfig optimizer{1.0, 0.95, 1e-6};
  std::uint64_t seed = 1;
  std::size_t hidden = 64;  // regression head width
};

inline nlohmann::json to_json(const HeadConfig& cfg) {
  return {{"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"lr", cfg.optimizer.lr},
          {"rho", cfg.optimizer.rho},
          {"eps", cfg.optimizer.eps},
          {"seed", cfg.seed},
          {"hidden", cfg.hidden}};
}

namespace detail {

/// Shared minibatch loop: grad_fn(row, g_w, g_b) accumulates one sample's
/// gradient; the mean over the batch is applied with Adadelta.
template <typename GradFn>
void fit_linear(DenseMatrix& w, Vector& b, std::size_t rows, const HeadConfig& cfg, GradFn&& grad_fn) {
  Rng rng(cfg.seed);
  DenseMatrix gw(w.rows(), w.cols());
  Vector gb(b.size());
  DenseMatrix acc_gw(w.rows(), w.cols()), acc_uw(w.rows(), w.cols());
  Vector acc_gb(b.size()), acc_ub(b.size());
  std::vector<std::size_t> order(rows);
  for (std::size_t i = 0; i < rows; ++i) order[i] = i;
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch_size);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < rows; start += batch) {
      const std::size_t end = std::min(rows, start + batch);
      std::fill(gw.data().begin(), gw.data().end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) grad_fn(order[i], gw, gb);
      const double n = static_cast<double>(end - start);
      for (double& v : gw.data()) v /= n;
      for (double& v : gb) v /= n;
      adadelta_step(w.data(), gw.data(), acc_gw.data(), acc_uw.data(), cfg.optimizer);
      adadelta_step(b, gb, acc_gb, acc_ub, cfg.optimizer);
    }
  }
}

inline void check_features(const DenseMatrix& train, const DenseMatrix& test) {
  if (train.rows() == 0) throw Error("no training rows");
  if (test.rows() == 0) throw Error("no test rows");
  if (train.cols() != test.cols()) throw Error("train/test feature width mismatch");
}

}  // namespace detail

/// Single-layer softmax classifier with cross-entropy loss. Returns test
/// accuracy. Labels are class indices.
inline double fit_softmax_head(const DenseMatrix& train_x, std::span<const std::size_t> train_y,
                               const DenseMatrix& test_x, std::span<const std::size_t> test_y,
                               const HeadConfig& cfg = {}) {
  detail::check_features(train_x, test_x);
  if (train_y.size() != train_x.rows() || test_y.size() != test_x.rows()) {
    throw Error("label count does not match feature rows");
  }
  const std::set<std::size_t> classes(train_y.begin(), train_y.end());
  if (classes.size() < 2) throw Error("classification needs at least two classes in training");
  // Test labels never seen in training simply never match a prediction.
  const std::size_t num_classes = *classes.rbegin() + 1;

  const std::size_t f = train_x.cols();
  DenseMatrix w(num_classes, f);
  Vector b(num_classes, 0.0);
  Vector logits(num_classes);
  auto predict_proba = [&](std::span<const double> x) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < num_classes; ++c) {
      logits[c] = dot(w.row(c), x) + b[c];
      top = std::max(top, logits[c]);
    }
    double z = 0.0;
    for (double& l : logits) z += (l = std::exp(l - top));
    for (double& l : logits) l /= z;
  };
  detail::fit_linear(w, b, train_x.rows(), cfg, [&](std::size_t r, DenseMatrix& gw, Vector& gb) {
    const auto x = train_x.row(r);
    predict_proba(x);
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double g = logits[c] - (c == train_y[r] ? 1.0 : 0.0);
      gb[c] += g;
      auto gr = gw.row(c);
      for (std::size_t i = 0; i < f; ++i) gr[i] += g * x[i];
    }
  });

  std::size_t correct = 0;
  for (std::size_t r = 0; r < test_x.rows(); ++r) {
    predict_proba(test_x.row(r));
    const auto best = static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (best == test_y[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_x.rows());
}

using LabelSet = std::vector<std::size_t>;

struct F1Scores {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::vector<std::size_t> excluded_labels;  // left out of the macro average
};

namespace detail {

inline double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace detail

/// Macro F1 averages per-label F1 over labels with macro_mask set (all when
/// empty); micro F1 pools every decision. F1 is 0 when precision + recall is 0.
inline F1Scores f1_scores(std::span<const LabelSet> predicted, std::span<const LabelSet> truth,
                          std::size_t num_labels, std::span<const std::uint8_t> macro_mask = {}) {
  if (predicted.size() != truth.size()) throw Error("f1_scores: row count mismatch");
  std::vector<std::size_t> tp(num_labels), fp(num_labels), fn(num_labels);
  std::vector<std::uint8_t> in_pred(num_labels), in_true(num_labels);
  for (std::size_t r = 0; r < truth.size(); ++r) {
    std::fill(in_pred.begin(), in_pred.end(), 0);
    std::fill(in_true.begin(), in_true.end(), 0);
    for (std::size_t l : predicted[r]) in_pred.at(l) = 1;
    for (std::size_t l : truth[r]) in_true.at(l) = 1;
    for (std::size_t l = 0; l < num_labels; ++l) {
      if (in_pred[l] && in_true[l]) ++tp[l];
      else if (in_pred[l]) ++fp[l];
      else if (in_true[l]) ++fn[l];
    }
  }
  F1Scores out;
  std::size_t counted = 0, tp_all = 0, fp_all = 0, fn_all = 0;
  double macro = 0.0;
  for (std::size_t l = 0; l < num_labels; ++l) {
    tp_all += tp[l];
    fp_all += fp[l];
    fn_all += fn[l];
    if (!macro_mask.empty() && !macro_mask[l]) {
      out.excluded_labels.push_back(l);
      continue;
    }
    macro += detail::f1(tp[l], fp[l], fn[l]);
    ++counted;
  }
  out.macro_f1 = counted == 0 ? 0.0 : macro / static_cast<double>(counted);
  out.micro_f1 = detail::f1(tp_all, fp_all, fn_all);
  return out;
}

/// Independent per-label logistic outputs with cross-entropy loss; a label
/// is predicted when its probability exceeds 0.5.
inline F1Scores fit_mlc_head(const DenseMatrix& train_x, std::span<const LabelSet> train_sets,
                             const DenseMatrix& test_x, std::span<const LabelSet> test_sets,
                             std::size_t num_labels, const HeadConfig& cfg = {}) {
  detail::check_features(train_x, test_x);
  if (train_sets.size() != train_x.rows() || test_sets.size() != test_x.rows()) {
    throw Error("label count does not match feature rows");
  }
  std::vector<std::uint8_t> seen(num_labels, 0);
  for (std::size_t r = 0; r < train_sets.size(); ++r) {
    if (train_sets[r].empty()) throw Error("training row " + std::to_string(r) + " has no labels");
    for (std::size_t l : train_sets[r]) seen.at(l) = 1;
  }

  const std::size_t f = train_x.cols();
  DenseMatrix w(num_labels, f);
  Vector b(num_labels, 0.0);
  std::vector<std::uint8_t> target(num_labels);
  detail::fit_linear(w, b, train_x.rows(), cfg, [&](std::size_t r, DenseMatrix& gw, Vector& gb) {
    const auto x = train_x.row(r);
    std::fill(target.begin(), target.end(), 0);
    for (std::size_t l : train_sets[r]) target[l] = 1;
    for (std::size_t l = 0; l < num_labels; ++l) {
      const double g = sigmoid(dot(w.row(l), x) + b[l]) - target[l];
      gb[l] += g;
      auto gr = gw.row(l);
      for (std::size_t i = 0; i < f; ++i) gr[i] += g * x[i];
    }
  });

  std::vector<LabelSet> predicted(test_x.rows());
  for (std::size_t r = 0; r < test_x.rows(); ++r) {
    for (std::size_t l = 0; l < num_labels; ++l) {
      if (sigmoid(dot(w.row(l), test_x.row(r)) + b[l]) > 0.5) predicted[r].push_back(l);
    }
  }
  return f1_scores(predicted, test_sets, num_labels, seen);
}

/// 1 - SS_res / SS_tot. Negative when worse than predicting the mean.
inline double r_squared(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size() || target.empty()) throw Error("r_squared: size mismatch");
  double mean = 0.0;
  for (double t : target) mean += t;
  mean /= static_cast<double>(target.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    ss_res += (target[i] - predicted[i]) * (target[i] - predicted[i]);
    ss_tot += (target[i] - mean) * (target[i] - mean);
  }
  if (ss_tot == 0.0) throw Error("r_squared: targets have zero variance");
  return 1.0 - ss_res / ss_tot;
}

/// Two-layer regressor (tanh hidden layer, sigmoid output) trained on
/// squared error. Returns r^2 on the test rows.
inline double fit_regression_head(const DenseMatrix& train_x, std::span<const double> train_y,
                                  const DenseMatrix& test_x, std::span<const double> test_y,
                                  const HeadConfig& cfg = {}) {
  detail::check_features(train_x, test_x);
  if (train_y.size() != train_x.rows() || test_y.size() != test_x.rows()) {
    throw Error("score count does not match feature rows");
  }
  for (double y : train_y) {
    if (!(y >= 0.0 && y <= 1.0)) throw Error("regression targets must lie in [0, 1]");
  }
  {
    const auto [lo, hi] = std::minmax_element(train_y.begin(), train_y.end());
    if (*lo == *hi) throw Error("regression targets have zero variance");
  }
  if (cfg.hidden == 0) throw Error("regression head needs a hidden layer");

  const std::size_t f = train_x.cols();
  const std::size_t h = cfg.hidden;
  Rng rng(cfg.seed);
  DenseMatrix w1 = glorot_uniform_init(h, f, rng);
  Vector b1(h, 0.0);
  DenseMatrix w2 = glorot_uniform_init(1, h, rng);
  Vector b2(1, 0.0);

  DenseMatrix g1(h, f), a1g(h, f), a1u(h, f);
  Vector gb1(h), ab1g(h), ab1u(h);
  DenseMatrix g2(1, h), a2g(1, h), a2u(1, h);
  Vector gb2(1), ab2g(1), ab2u(1);
  Vector hidden(h);

  auto forward = [&](std::span<const double> x) {
    for (std::size_t j = 0; j < h; ++j) hidden[j] = std::tanh(dot(w1.row(j), x) + b1[j]);
    return sigmoid(dot(w2.row(0), hidden) + b2[0]);
  };

  std::vector<std::size_t> order(train_x.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch_size);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      for (auto* buf : {&g1, &g2}) std::fill(buf->data().begin(), buf->data().end(), 0.0);
      std::fill(gb1.begin(), gb1.end(), 0.0);
      gb2[0] = 0.0;
      for (std::size_t s = start; s < end; ++s) {
        const auto x = train_x.row(order[s]);
        const double y = forward(x);
        const double d_out = 2.0 * (y - train_y[order[s]]) * y * (1.0 - y);
        gb2[0] += d_out;
        for (std::size_t j = 0; j < h; ++j) {
          g2(0, j) += d_out * hidden[j];
          const double d_hidden = d_out * w2(0, j) * (1.0 - hidden[j] * hidden[j]);
          gb1[j] += d_hidden;
          auto gr = g1.row(j);
          for (std::size_t i = 0; i < f; ++i) gr[i] += d_hidden * x[i];
        }
      }
      const double n = static_cast<double>(end - start);
      for (auto* buf : {&g1, &g2}) {
        for (double& v : buf->data()) v /= n;
      }
      for (double& v : gb1) v /= n;
      gb2[0] /= n;
      adadelta_step(w1.data(), g1.data(), a1g.data(), a1u.data(), cfg.optimizer);
      adadelta_step(b1, gb1, ab1g, ab1u, cfg.optimizer);
      adadelta_step(w2.data(), g2.data(), a2g.data(), a2u.data(), cfg.optimizer);
      adadelta_step(b2, gb2, ab2g, ab2u, cfg.optimizer);
    }
  }

  Vector predicted(test_x.rows());
  for (std::size_t r = 0; r < test_x.rows(); ++r) predicted[r] = forward(test_x.row(r));
  return r_squared(predicted, test_y);
}

// ---------------------------------------------------------------------------
// Retrieval

/// Log-spaced retrieval fractions from 0.0002 to 1.
inline std::vector<double> default_retrieval_fractions() {
  return {0.0002, 0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
}

struct RetrievalResult {
  std::vector<double> fractions;
  std::vector<double> precision;
  std::size_t skipped_queries = 0;  // zero query vectors, cosine undefined
};

/// Each test row queries the training rows ranked by cosine similarity
/// (ties to the lower training index). Precision at fraction f is the share
/// of the top max(1, ceil(f * N)) training rows whose label matches the
/// query's, averaged over queries.
inline RetrievalResult retrieval_precision(const DenseMatrix& train_enc,
                                           std::span<const std::size_t> train_labels,
                                           const DenseMatrix& test_enc,
                                           std::span<const std::size_t> test_labels,
                                           std::span<const double> fractions) {
  detail::check_features(train_enc, test_enc);
  if (train_labels.size() != train_enc.rows() || test_labels.size() != test_enc.rows()) {
    throw Error("label count does not match encoded rows");
  }
  const std::size_t n = train_enc.rows();
  std::vector<std::size_t> cutoffs;
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw Error("retrieval fractions must lie in (0, 1]");
    cutoffs.push_back(std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9)), 1, n));
  }

  DenseMatrix unit(n, train_enc.cols());
  for (std::size_t r = 0; r < n; ++r) {
    const double nr = norm(train_enc.row(r));
    if (nr == 0.0) continue;
    auto dst = unit.row(r);
    const auto src = train_enc.row(r);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] / nr;
  }

  const std::size_t q = test_enc.rows();
  DenseMatrix per_query(q, cutoffs.size());
  std::vector<std::uint8_t> skipped(q, 0);
  parallel_for(q, [&](std::size_t r) {
    const auto query = test_enc.row(r);
    const double nq = norm(query);
    if (nq == 0.0) {
      skipped[r] = 1;
      return;
    }
    std::vector<std::pair<double, std::size_t>> scored(n);
    for (std::size_t t = 0; t < n; ++t) scored[t] = {dot(unit.row(t), query) / nq, t};
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::size_t> hits(n + 1, 0);
    for (std::size_t t = 0; t < n; ++t) {
      hits[t + 1] = hits[t] + (train_labels[scored[t].second] == test_labels[r] ? 1 : 0);
    }
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      per_query(r, c) = static_cast<double>(hits[cutoffs[c]]) / static_cast<double>(cutoffs[c]);
    }
  });

  RetrievalResult out;
  out.fractions.assign(fractions.begin(), fractions.end());
  out.precision.assign(cutoffs.size(), 0.0);
  std::size_t used = 0;
  for (std::size_t r = 0; r < q; ++r) {
    if (skipped[r]) {
      ++out.skipped_queries;
      continue;
    }
    ++used;
    for (std::size_t c = 0; c < cutoffs.size(); ++c) out.precision[c] += per_query(r, c);
  }
  if (used > 0) {
    for (double& p : out.precision) p /= static_cast<double>(used);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Label bookkeeping and file formats

/// Maps label strings to dense indices in sorted order.
class LabelIndex {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  void add(const std::string& label) { ids_.emplace(label, 0); }

  void finalize() {
    std::size_t i = 0;
    names_.clear();
    for (auto& [name, id] : ids_) {
      id = i++;
      names_.push_back(name);
    }
  }

  std::size_t id(const std::string& label) const {
    const auto it = ids_.find(label);
    return it == ids_.end() ? npos : it->second;
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::map<std::string, std::size_t> ids_;
  std::vector<std::string> names_;
};

struct EncodedMatrix {
  std::vector<std::string> ids;
  DenseMatrix vectors;
};

inline void write_encoded(std::ostream& out, std::span<const std::string> ids, const DenseMatrix& enc) {
  if (ids.size() != enc.rows()) throw Error("write_encoded: id count mismatch");
  for (std::size_t r = 0; r < enc.rows(); ++r) {
    const auto row = enc.row(r);
    nlohmann::json obj = {{"id", ids[r]}, {"vec", std::vector<double>(row.begin(), row.end())}};
    out << obj.dump() << '\n';
  }
}

inline EncodedMatrix read_encoded(std::istream& in) {
  EncodedMatrix out;
  std::vector<double> flat;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw Error("encoded line " + std::to_string(line_no) + ": malformed JSON");
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("vec") || !obj["vec"].is_array()) {
      throw Error("encoded line " + std::to_string(line_no) + ": expected {\"id\", \"vec\"}");
    }
    const auto vec = obj["vec"].get<std::vector<double>>();
    if (out.ids.empty()) width = vec.size();
    if (vec.size() != width) {
      throw Error("encoded line " + std::to_string(line_no) + ": vector width mismatch");
    }
    out.ids.push_back(obj["id"].get<std::string>());
    flat.insert(flat.end(), vec.begin(), vec.end());
  }
  out.vectors = DenseMatrix(out.ids.size(), width, std::move(flat));
  return out;
}

inline nlohmann::json make_report(const std::string& task, const std::string& metric, double value,
                                  nlohmann::json config) {
  return {{"task", task}, {"metric", metric}, {"value", value}, {"config", std::move(config)}};
}

}  // namespace kate

#endif  // KATE_EVAL_HPP
