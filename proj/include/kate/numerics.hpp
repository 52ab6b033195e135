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

#ifndef KATE_NUMERICS_HPP
#define KATE_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace kate {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vector = std::vector<double>;

struct SparseEntry {
  std::uint32_t index = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error("matrix data length " + std::to_string(data_.size()) +
                  " does not match " + std::to_string(rows_) + "x" +
                  std::to_string(cols_));
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Seeded random stream. Only the raw 64-bit engine output is used so that
/// a given seed produces the same numbers with every standard library.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), rejection sampled.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below: empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Worker count from KATE_THREADS (0 or unset = hardware concurrency).
inline std::size_t thread_count() {
  static const std::size_t count = [] {
    std::size_t n = 0;
    if (const char* env = std::getenv("KATE_THREADS")) {
      n = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
  }();
  return count;
}

/// Runs fn(i) for i in [0, n), split into contiguous blocks across threads.
/// Callers must make each index write disjoint state; results are then
/// independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

inline DenseMatrix glorot_uniform_init(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) throw Error("glorot_uniform_init: zero dimension");
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-limit, limit);
  return m;
}

/// Wx + bias.
inline Vector affine(std::span<const double> x, const DenseMatrix& w,
                     std::span<const double> bias) {
  if (x.size() != w.cols() || bias.size() != w.rows()) {
    throw Error("affine: shape mismatch (W is " + std::to_string(w.rows()) + "x" +
                std::to_string(w.cols()) + ", x has " + std::to_string(x.size()) +
                ", bias has " + std::to_string(bias.size()) + ")");
  }
  Vector out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const auto row = w.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
    out[r] = acc + bias[r];
  }
  return out;
}

/// Wx + bias for a sparse x of logical length dim.
inline Vector affine(std::span<const SparseEntry> x, std::size_t dim, const DenseMatrix& w,
                     std::span<const double> bias) {
  if (dim != w.cols() || bias.size() != w.rows()) {
    throw Error("affine: shape mismatch (W is " + std::to_string(w.rows()) + "x" +
                std::to_string(w.cols()) + ", x has " + std::to_string(dim) +
                ", bias has " + std::to_string(bias.size()) + ")");
  }
  Vector out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const auto row = w.row(r);
    double acc = 0.0;
    for (const auto& e : x) acc += row[e.index] * e.value;
    out[r] = acc + bias[r];
  }
  return out;
}

inline double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

inline Vector tanh_vec(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::tanh(x); });
  return out;
}

inline Vector sigmoid_vec(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return sigmoid(x); });
  return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Cosine similarity; 0 when either vector is zero.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace kate

#endif  // KATE_NUMERICS_HPP
