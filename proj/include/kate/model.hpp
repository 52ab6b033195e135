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

#ifndef KATE_MODEL_HPP
#define KATE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kate/corpus.hpp"
#include "kate/kcomp.hpp"
#include "kate/numerics.hpp"
#include "kate/optim.hpp"

namespace kate {

enum class Variant { kate, ksae, plain };
enum class Activation { tanh, sigmoid };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kate: return "kate";
    case Variant::ksae: return "ksae";
    case Variant::plain: return "plain";
  }
  return "?";
}

inline std::string_view to_string(Activation a) {
  return a == Activation::tanh ? "tanh" : "sigmoid";
}

inline std::string_view to_string(Selection s) {
  return s == Selection::absolute ? "absolute" : "sign_split";
}

/// Winner count used when none is given: the tuned values for 20/128/512
/// topics, otherwise a quarter of the topics rounded up.
inline std::size_t default_k(std::size_t topics) {
  switch (topics) {
    case 20: return 6;
    case 128: return 32;
    case 512: return 102;
    default: return std::max<std::size_t>(1, (topics + 3) / 4);
  }
}

struct TrainConfig {
  std::size_t topics = 128;
  std::size_t k = 32;
  double alpha = 6.26;
  std::size_t batch_size = 50;
  double lr = 2.0;
  double rho = 0.95;
  double eps = 1e-6;
  std::size_t patience = 5;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 1;
  Variant variant = Variant::kate;
  Selection selection = Selection::absolute;  // ksae only
  Activation hidden_activation = Activation::tanh;

  AdadeltaConfig optimizer() const { return {lr, rho, eps}; }

  void validate() const {
    if (topics == 0) throw Error("topic count must be at least 1");
    if (variant != Variant::plain && (k < 1 || k > topics)) {
      throw Error("invalid k: " + std::to_string(k) + " (need 1 <= k <= " +
                  std::to_string(topics) + ")");
    }
    if (!(alpha >= 0.0)) throw Error("alpha must be non-negative");
    if (batch_size == 0) throw Error("batch size must be at least 1");
    if (!(rho > 0.0 && rho < 1.0)) throw Error("rho must be in (0, 1)");
    if (!(eps > 0.0)) throw Error("eps must be positive");
    if (!(lr > 0.0)) throw Error("learning rate must be positive");
    if (patience == 0) throw Error("patience must be at least 1");
    if (max_epochs == 0) throw Error("max epochs must be at least 1");
  }
};

/// Tied-weight autoencoder parameters. w is m x d: row j holds hidden
/// neuron j's connections to every input word; the decoder uses w^T.
struct ModelParams {
  DenseMatrix w;
  Vector b;  // hidden bias, m
  Vector c;  // output bias, d

  std::size_t d() const { return w.cols(); }
  std::size_t m() const { return w.rows(); }

  static ModelParams zeros(std::size_t d, std::size_t m) {
    return {DenseMatrix(m, d), Vector(m, 0.0), Vector(d, 0.0)};
  }

  static ModelParams initialize(std::size_t d, std::size_t m, Rng& rng) {
    return {glorot_uniform_init(m, d, rng), Vector(m, 0.0), Vector(d, 0.0)};
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Same shapes as ModelParams.
using Gradients = ModelParams;

struct ForwardTrace {
  DocVector x;
  Vector z;       // hidden activations before competition
  Vector z_hat;   // after competition / sparsification
  CompetitionResult comp;           // variant kate
  std::vector<std::uint8_t> keep;   // variant ksae
  Vector out_pre;  // output pre-activations
  Vector x_hat;    // sigmoid outputs
};

namespace detail {

inline void check_input(const ModelParams& params, const DocVector& x) {
  if (x.dim != params.d()) {
    throw Error("input dimension " + std::to_string(x.dim) + " does not match model dimension " +
                std::to_string(params.d()));
  }
}

inline Vector activate(Vector v, Activation act) {
  return act == Activation::tanh ? tanh_vec(v) : sigmoid_vec(v);
}

inline double activation_slope(double y, Activation act) {
  return act == Activation::tanh ? 1.0 - y * y : y * (1.0 - y);
}

/// -[x log s(a) + (1 - x) log(1 - s(a))] written via softplus so it stays
/// finite when s(a) rounds to 0 or 1.
inline double bce_from_logit(double x, double a) {
  const double softplus = std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
  return softplus - x * a;
}

}  // namespace detail

/// Test-time encoding: act(Wx + b), no competition.
inline Vector encode(const ModelParams& params, const DocVector& x,
                     Activation act = Activation::tanh) {
  detail::check_input(params, x);
  return detail::activate(affine(x.entries, x.dim, params.w, params.b), act);
}

inline ForwardTrace forward_train(const ModelParams& params, const DocVector& x,
                                  const TrainConfig& cfg) {
  detail::check_input(params, x);
  ForwardTrace t;
  t.x = x;
  t.z = detail::activate(affine(x.entries, x.dim, params.w, params.b), cfg.hidden_activation);
  switch (cfg.variant) {
    case Variant::kate:
      t.comp = k_competitive_forward(t.z, cfg.k, cfg.alpha);
      t.z_hat = t.comp.z_hat;
      break;
    case Variant::ksae:
      t.keep = select_k(t.z, cfg.k, cfg.selection);
      t.z_hat = apply_mask(t.z, t.keep);
      break;
    case Variant::plain:
      t.z_hat = t.z;
      break;
  }
  t.out_pre = params.c;
  for (std::size_t j = 0; j < params.m(); ++j) {
    const double h = t.z_hat[j];
    if (h == 0.0) continue;
    const auto row = params.w.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) t.out_pre[i] += h * row[i];
  }
  t.x_hat = sigmoid_vec(t.out_pre);
  return t;
}

/// Summed binary cross-entropy over all d dimensions.
inline double bce_loss(const DocVector& x, std::span<const double> x_hat) {
  if (x_hat.size() != x.dim) throw Error("bce_loss: dimension mismatch");
  double loss = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < x_hat.size(); ++i) {
    const double p = x_hat[i];
    if (!(p > 0.0 && p < 1.0)) throw Error("saturated output");
    double target = 0.0;
    if (next < x.entries.size() && x.entries[next].index == i) target = x.entries[next++].value;
    loss -= target * std::log(p) + (1.0 - target) * std::log1p(-p);
  }
  return loss;
}

/// Loss of a trace, evaluated from the output pre-activations.
inline double trace_loss(const ForwardTrace& t) {
  double loss = 0.0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < t.out_pre.size(); ++i) {
    double target = 0.0;
    if (next < t.x.entries.size() && t.x.entries[next].index == i) {
      target = t.x.entries[next++].value;
    }
    loss += detail::bce_from_logit(target, t.out_pre[i]);
  }
  return loss;
}

namespace detail {

/// Per-sample error signals from which parameter gradients are assembled.
struct SampleDeltas {
  const DocVector* x = nullptr;
  Vector out;     // d loss / d output pre-activation = x_hat - x
  Vector hidden;  // d loss / d hidden pre-activation
  Vector z_hat;
};

inline SampleDeltas sample_deltas(const ForwardTrace& t, const ModelParams& params,
                                  const TrainConfig& cfg) {
  const std::size_t m = params.m();
  SampleDeltas s;
  s.x = &t.x;
  s.z_hat = t.z_hat;
  s.out = t.x_hat;
  for (const auto& e : t.x.entries) s.out[e.index] -= e.value;

  // Upstream into z_hat is W (x_hat - x); loser rows are overwritten by the
  // competition backward, so skip them.
  std::vector<std::uint8_t> needed(m, 1);
  if (cfg.variant == Variant::kate) {
    for (std::size_t j : t.comp.pos_losers) needed[j] = 0;
    for (std::size_t j : t.comp.neg_losers) needed[j] = 0;
  } else if (cfg.variant == Variant::ksae) {
    needed = t.keep;
  }
  Vector upstream(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (needed[j]) upstream[j] = dot(params.w.row(j), s.out);
  }

  Vector grad_z;
  switch (cfg.variant) {
    case Variant::kate: grad_z = k_competitive_backward(t.comp, upstream, cfg.alpha); break;
    case Variant::ksae: grad_z = apply_mask(upstream, t.keep); break;
    case Variant::plain: grad_z = std::move(upstream); break;
  }
  s.hidden.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    s.hidden[j] = grad_z[j] * activation_slope(t.z[j], cfg.hidden_activation);
  }
  return s;
}

/// Mean of per-sample gradients. W row j accumulates its encoder term
/// hidden_j * x and decoder term z_hat_j * out sample by sample in order,
/// so the result does not depend on the thread count.
inline Gradients reduce_gradients(std::size_t d, std::size_t m,
                                  std::span<const SampleDeltas> samples) {
  Gradients g = ModelParams::zeros(d, m);
  const double n = static_cast<double>(samples.size());
  parallel_for(m, [&](std::size_t j) {
    auto row = g.w.row(j);
    double gb = 0.0;
    for (const auto& s : samples) {
      const double h = s.hidden[j];
      if (h != 0.0) {
        for (const auto& e : s.x->entries) row[e.index] += h * e.value;
      }
      const double a = s.z_hat[j];
      if (a != 0.0) {
        for (std::size_t i = 0; i < d; ++i) row[i] += a * s.out[i];
      }
      gb += h;
    }
    for (double& v : row) v /= n;
    g.b[j] = gb / n;
  });
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < d; ++i) g.c[i] += s.out[i];
  }
  for (double& v : g.c) v /= n;
  return g;
}

}  // namespace detail

/// Exact gradients of trace_loss w.r.t. W (encoder + decoder paths), b, c.
inline Gradients backward(const ForwardTrace& trace, const ModelParams& params,
                          const TrainConfig& cfg) {
  const detail::SampleDeltas s = detail::sample_deltas(trace, params, cfg);
  return detail::reduce_gradients(params.d(), params.m(), std::span(&s, 1));
}

/// Mean gradient over a batch; also returns the summed loss.
inline Gradients batch_gradient(const ModelParams& params, std::span<const DocVector* const> batch,
                                const TrainConfig& cfg, double* loss_sum = nullptr) {
  if (batch.empty()) throw Error("batch_gradient: empty batch");
  std::vector<detail::SampleDeltas> samples(batch.size());
  std::vector<double> losses(batch.size());
  parallel_for(batch.size(), [&](std::size_t i) {
    const ForwardTrace t = forward_train(params, *batch[i], cfg);
    losses[i] = trace_loss(t);
    samples[i] = detail::sample_deltas(t, params, cfg);
    samples[i].x = batch[i];
  });
  if (loss_sum) {
    double total = 0.0;
    for (double l : losses) total += l;
    *loss_sum = total;
  }
  return detail::reduce_gradients(params.d(), params.m(), samples);
}

struct AdadeltaState {
  Gradients acc_grad;
  Gradients acc_update;

  static AdadeltaState zeros(std::size_t d, std::size_t m) {
    return {ModelParams::zeros(d, m), ModelParams::zeros(d, m)};
  }
};

inline void adadelta_update(ModelParams& params, const Gradients& grads, AdadeltaState& state,
                            const AdadeltaConfig& cfg) {
  adadelta_step(params.w.data(), grads.w.data(), state.acc_grad.w.data(),
                state.acc_update.w.data(), cfg);
  adadelta_step(params.b, grads.b, state.acc_grad.b, state.acc_update.b, cfg);
  adadelta_step(params.c, grads.c, state.acc_grad.c, state.acc_update.c, cfg);
}

/// Mean per-document training-time loss.
inline double mean_loss(const ModelParams& params, std::span<const DocVector> docs,
                        const TrainConfig& cfg) {
  if (docs.empty()) throw Error("mean_loss: no documents");
  std::vector<double> losses(docs.size());
  parallel_for(docs.size(),
               [&](std::size_t i) { losses[i] = trace_loss(forward_train(params, docs[i], cfg)); });
  double total = 0.0;
  for (double l : losses) total += l;
  return total / static_cast<double>(docs.size());
}

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_loss = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
  double initial_train_loss = 0.0;
  double initial_valid_loss = 0.0;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  bool stopped_early = false;

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Minibatch Adadelta training with per-epoch shuffling and early stopping
/// on validation loss. Returns the parameters of the best epoch.
inline TrainResult train(const Dataset& train_set, const Dataset& valid_set,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (train_set.empty()) throw Error("training set is empty");
  if (valid_set.empty()) throw Error("validation set is empty");
  const std::size_t d = train_set.vocab.size();
  if (d == 0) throw Error("empty vocabulary");
  if (valid_set.vocab.size() != d) throw Error("vocabulary mismatch");

  Rng rng(cfg.seed);
  ModelParams params = ModelParams::initialize(d, cfg.topics, rng);
  AdadeltaState state = AdadeltaState::zeros(d, cfg.topics);
  const AdadeltaConfig opt = cfg.optimizer();

  TrainResult result;
  result.history.initial_train_loss = mean_loss(params, train_set.vectors, cfg);
  result.history.initial_valid_loss = mean_loss(params, valid_set.vectors, cfg);
  result.params = params;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<const DocVector*> batch;
  EarlyStopping stopper(cfg.patience);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set.vectors[order[i]]);
      double batch_loss = 0.0;
      const Gradients g = batch_gradient(params, batch, cfg, &batch_loss);
      adadelta_update(params, g, state, opt);
      epoch_loss += batch_loss;
    }

    EpochRecord rec{epoch, epoch_loss / static_cast<double>(order.size()),
                    mean_loss(params, valid_set.vectors, cfg)};
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stopper.update(rec.valid_loss)) result.params = params;
    if (stopper.should_stop()) {
      result.history.stopped_early = true;
      break;
    }
  }
  result.history.best_epoch = stopper.best_epoch();
  return result;
}

/// Encodes every document of a dataset; row order follows the dataset.
inline DenseMatrix encode_dataset(const ModelParams& params, const Dataset& ds,
                                  Activation act = Activation::tanh) {
  if (ds.vocab.size() != params.d()) throw Error("vocabulary mismatch");
  DenseMatrix out(ds.size(), params.m());
  parallel_for(ds.size(), [&](std::size_t r) {
    const Vector z = encode(params, ds.vectors[r], act);
    std::copy(z.begin(), z.end(), out.row(r).begin());
  });
  return out;
}

}  // namespace kate

#endif  // KATE_MODEL_HPP
