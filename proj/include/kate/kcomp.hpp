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

#ifndef KATE_KCOMP_HPP
#define KATE_KCOMP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kate/numerics.hpp"

namespace kate {

/// Counts calls into the competitive/sparse selection layers. Lets tests
/// check that the encoding path never runs competition.
inline std::atomic<std::uint64_t> competition_invocations{0};

/**
 * Output of the k-competitive layer for one sample.
 *
 * Winners and losers are recorded only for a sign side whose branch fired
 * (more candidates than winner slots). Neurons on a side whose branch did
 * not fire appear in none of the four sets and pass through unchanged.
 */
struct CompetitionResult {
  Vector z_hat;
  std::vector<std::size_t> pos_winners;
  std::vector<std::size_t> neg_winners;
  std::vector<std::size_t> pos_losers;
  std::vector<std::size_t> neg_losers;
  double e_pos = 0.0;  // sum of positive loser activations, >= 0
  double e_neg = 0.0;  // sum of negative loser activations, <= 0
};

enum class Selection {
  absolute,    // k largest |z|
  sign_split,  // ceil(k/2) largest positives, floor(k/2) most negative
};

namespace detail {

inline void check_k(std::size_t k, std::size_t m) {
  if (k < 1 || k > m) {
    throw Error("invalid k: " + std::to_string(k) + " (need 1 <= k <= " + std::to_string(m) + ")");
  }
}

/// Indices with z >= 0 ordered by value descending, and indices with z < 0
/// ordered by value ascending. Equal values keep lower index first.
inline void sign_partition(std::span<const double> z, std::vector<std::size_t>& pos,
                           std::vector<std::size_t>& neg) {
  for (std::size_t i = 0; i < z.size(); ++i) (z[i] >= 0.0 ? pos : neg).push_back(i);
  std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
  std::stable_sort(neg.begin(), neg.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
}

}  // namespace detail

/// Forward pass of the k-competitive layer.
///
/// Positive side: when more than ceil(k/2) neurons are non-negative, the
/// ceil(k/2) largest win and each gains alpha * E_pos, where E_pos sums the
/// remaining positives; those losers are zeroed. Negative side likewise with
/// floor(k/2) winners and E_neg.
inline CompetitionResult k_competitive_forward(std::span<const double> z, std::size_t k,
                                               double alpha) {
  detail::check_k(k, z.size());
  if (alpha < 0.0) throw Error("alpha must be non-negative");
  ++competition_invocations;

  CompetitionResult r;
  r.z_hat.assign(z.begin(), z.end());

  std::vector<std::size_t> pos, neg;
  detail::sign_partition(z, pos, neg);
  const std::size_t pos_slots = (k + 1) / 2;
  const std::size_t neg_slots = k / 2;

  if (pos.size() > pos_slots) {
    r.pos_winners.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(pos_slots));
    r.pos_losers.assign(pos.begin() + static_cast<std::ptrdiff_t>(pos_slots), pos.end());
    for (std::size_t j : r.pos_losers) r.e_pos += z[j];
    for (std::size_t i : r.pos_winners) r.z_hat[i] = z[i] + alpha * r.e_pos;
    for (std::size_t j : r.pos_losers) r.z_hat[j] = 0.0;
  }
  if (neg.size() > neg_slots) {
    r.neg_winners.assign(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(neg_slots));
    r.neg_losers.assign(neg.begin() + static_cast<std::ptrdiff_t>(neg_slots), neg.end());
    for (std::size_t j : r.neg_losers) r.e_neg += z[j];
    for (std::size_t i : r.neg_winners) r.z_hat[i] = z[i] + alpha * r.e_neg;
    for (std::size_t j : r.neg_losers) r.z_hat[j] = 0.0;
  }
  std::sort(r.pos_winners.begin(), r.pos_winners.end());
  std::sort(r.pos_losers.begin(), r.pos_losers.end());
  std::sort(r.neg_winners.begin(), r.neg_winners.end());
  std::sort(r.neg_losers.begin(), r.neg_losers.end());
  return r;
}

/// d loss / d z given d loss / d z_hat, holding the winner/loser partition
/// fixed. Each winner i on a side fired with z_hat_i = z_i + alpha * sum of
/// that side's losers, so a loser j receives alpha times the summed upstream
/// of its side's winners and nothing directly.
inline Vector k_competitive_backward(const CompetitionResult& result,
                                     std::span<const double> upstream, double alpha) {
  if (upstream.size() != result.z_hat.size()) {
    throw Error("k_competitive_backward: upstream has " + std::to_string(upstream.size()) +
                " entries, expected " + std::to_string(result.z_hat.size()));
  }
  Vector grad(upstream.begin(), upstream.end());
  double pos_sum = 0.0;
  for (std::size_t i : result.pos_winners) pos_sum += upstream[i];
  for (std::size_t j : result.pos_losers) grad[j] = alpha * pos_sum;
  double neg_sum = 0.0;
  for (std::size_t i : result.neg_winners) neg_sum += upstream[i];
  for (std::size_t j : result.neg_losers) grad[j] = alpha * neg_sum;
  return grad;
}

/// Keep-mask of the k selected neurons (1 = kept).
inline std::vector<std::uint8_t> select_k(std::span<const double> z, std::size_t k,
                                          Selection selection) {
  detail::check_k(k, z.size());
  ++competition_invocations;
  std::vector<std::uint8_t> keep(z.size(), 0);
  if (selection == Selection::absolute) {
    std::vector<std::size_t> order(z.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(z[a]) > std::abs(z[b]); });
    for (std::size_t i = 0; i < k; ++i) keep[order[i]] = 1;
    return keep;
  }
  std::vector<std::size_t> pos, neg;
  detail::sign_partition(z, pos, neg);
  const std::size_t pos_keep = std::min(pos.size(), (k + 1) / 2);
  const std::size_t neg_keep = std::min(neg.size(), k / 2);
  for (std::size_t i = 0; i < pos_keep; ++i) keep[pos[i]] = 1;
  for (std::size_t i = 0; i < neg_keep; ++i) keep[neg[i]] = 1;
  return keep;
}

inline Vector apply_mask(std::span<const double> v, std::span<const std::uint8_t> keep) {
  Vector out(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (keep[i]) out[i] = v[i];
  }
  return out;
}

/// k-sparse layer: keeps the k entries of largest magnitude, zeroes the rest.
inline Vector k_sparse_forward(std::span<const double> z, std::size_t k) {
  return apply_mask(z, select_k(z, k, Selection::absolute));
}

}  // namespace kate

#endif  // KATE_KCOMP_HPP
