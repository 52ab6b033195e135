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

#ifndef KATE_OPTIM_HPP
#define KATE_OPTIM_HPP

#include <cmath>
#include <limits>
#include <span>

#include "kate/numerics.hpp"

namespace kate {

struct AdadeltaConfig {
  double lr = 1.0;
  double rho = 0.95;
  double eps = 1e-6;
};

/// One Adadelta step over a flat parameter buffer. The accumulators hold
/// running averages of squared gradients and squared updates; lr scales the
/// resulting update.
inline void adadelta_step(std::span<double> theta, std::span<const double> grad,
                          std::span<double> acc_grad, std::span<double> acc_update,
                          const AdadeltaConfig& cfg) {
  if (grad.size() != theta.size() || acc_grad.size() != theta.size() ||
      acc_update.size() != theta.size()) {
    throw Error("adadelta_step: buffer size mismatch");
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    acc_grad[i] = cfg.rho * acc_grad[i] + (1.0 - cfg.rho) * g * g;
    const double delta = -(std::sqrt(acc_update[i] + cfg.eps) / std::sqrt(acc_grad[i] + cfg.eps)) * g;
    acc_update[i] = cfg.rho * acc_update[i] + (1.0 - cfg.rho) * delta * delta;
    theta[i] += cfg.lr * delta;
  }
}

/// Patience-based early stopping on a loss to be minimised. Epochs are
/// numbered from 1.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {
    if (patience == 0) throw Error("patience must be at least 1");
  }

  /// Records one epoch's loss; true when it is a new best.
  bool update(double loss) {
    ++epoch_;
    if (loss < best_loss_) {
      best_loss_ = loss;
      best_epoch_ = epoch_;
      stale_ = 0;
      return true;
    }
    ++stale_;
    return false;
  }

  bool should_stop() const { return stale_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t stale_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

}  // namespace kate

#endif  // KATE_OPTIM_HPP
