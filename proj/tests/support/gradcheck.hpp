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

#ifndef KATE_TESTS_GRADCHECK_HPP
#define KATE_TESTS_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <span>

#include "kate/model.hpp"

namespace kate::fixtures {

inline ModelParams random_params(std::size_t d, std::size_t m, Rng& rng, double scale = 0.5) {
  ModelParams p = ModelParams::zeros(d, m);
  for (double& v : p.w.data()) v = rng.uniform(-scale, scale);
  for (double& v : p.b) v = rng.uniform(-scale, scale);
  for (double& v : p.c) v = rng.uniform(-scale, scale);
  return p;
}

inline double full_loss(const ModelParams& p, const DocVector& x, const TrainConfig& cfg) {
  return trace_loss(forward_train(p, x, cfg));
}

/// Hidden pre-activations must stay clear of rank ties and of zero so that
/// central differences do not cross a selection boundary.
inline bool selection_stable(const ForwardTrace& t, double margin) {
  Vector s = t.z;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i]) < margin) return false;
    if (i > 0 && s[i] - s[i - 1] < margin) return false;
  }
  return true;
}

/// Worst relative error between analytic and central-difference gradients
/// over every parameter; entries below 1e-4 in magnitude are compared
/// absolutely.
inline double gradient_check(ModelParams p, const DocVector& x, const TrainConfig& cfg) {
  const Gradients g = backward(forward_train(p, x, cfg), p, cfg);
  const double h = 1e-5;  // 1e-6 is round-off bound once saturated outputs push the loss to ~50
  double worst = 0.0;
  auto probe = [&](std::span<double> params, std::span<const double> analytic) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double orig = params[i];
      params[i] = orig + h;
      const double up = full_loss(p, x, cfg);
      params[i] = orig - h;
      const double down = full_loss(p, x, cfg);
      params[i] = orig;
      const double fd = (up - down) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-4});
      worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
    }
  };
  probe(p.w.data(), g.w.data());
  probe(p.b, g.b);
  probe(p.c, g.c);
  return worst;
}

}  // namespace kate::fixtures

#endif  // KATE_TESTS_GRADCHECK_HPP
