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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "kate/eval.hpp"
#include "support/synthetic.hpp"

using namespace kate;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-1, 1);
  return m;
}

double mscd_oracle(const DenseMatrix& t) {
  const std::size_t m = t.rows();
  double sum = 0;
  int pairs = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j <= i) continue;
      double ab = 0, aa = 0, bb = 0;
      for (std::size_t k = 0; k < t.cols(); ++k) {
        ab += t(i, k) * t(j, k);
        aa += t(i, k) * t(i, k);
        bb += t(j, k) * t(j, k);
      }
      sum += ab * ab / (aa * bb);
      ++pairs;
    }
  }
  return std::sqrt(sum / pairs);
}

/// Two Gaussian blobs in `dim` dimensions, well separated along axis 0.
void blobs(std::size_t n, std::size_t dim, Rng& rng, DenseMatrix& x, std::vector<std::size_t>& y) {
  x = DenseMatrix(n, dim);
  y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    y[r] = r % 2;
    for (std::size_t c = 0; c < dim; ++c) x(r, c) = 0.3 * rng.normal();
    x(r, 0) += y[r] ? 1.5 : -1.5;
  }
}

}  // namespace

TEST(MscdTest, OrthogonalAndIdentical) {
  EXPECT_NEAR(mscd(DenseMatrix(2, 2, {1, 0, 0, 1})), 0.0, 1e-15);
  EXPECT_NEAR(mscd(DenseMatrix(2, 3, {1, 2, 3, 1, 2, 3})), 1.0, 1e-15);
}

TEST(MscdTest, MatchesDoubleLoop) {
  Rng rng(1);
  const auto t = random_matrix(5, 7, rng);
  EXPECT_NEAR(mscd(t), mscd_oracle(t), 1e-14);
}

TEST(MscdTest, ScalingAndNegationInvariant) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_matrix(6, 9, rng);
    const double base = mscd(t);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
    const std::size_t row = rng.below(6);
    const double scale = rng.uniform(0.1, 10) * (trial % 2 ? -1 : 1);
    for (double& v : t.row(row)) v *= scale;
    EXPECT_NEAR(mscd(t), base, 1e-12);
  }
}

TEST(MscdTest, Errors) {
  EXPECT_THROW(mscd(DenseMatrix(1, 3, 1.0)), Error);
  EXPECT_THROW(mscd(DenseMatrix(2, 2, {1, 0, 0, 0})), Error);
}

TEST(TopWordsTest, OneHotRow) {
  ModelParams p = ModelParams::zeros(4, 2);
  p.w(0, 2) = 1.0;
  p.w(1, 1) = -1.0;
  p.w(1, 3) = 0.5;
  const Vocabulary v({"a", "b", "c", "d"});
  const auto topics = top_words(p, v, 2);
  EXPECT_EQ(topics[0][0], "c");
  EXPECT_EQ(topics[1], (std::vector<std::string>{"d", "a"}));  // signed: -1 ranks last
  const auto abs_topics = top_words(p, v, 2, WeightMode::absolute);
  EXPECT_EQ(abs_topics[1], (std::vector<std::string>{"b", "d"}));
}

TEST(TopWordsTest, FullListIsPermutation) {
  Rng rng(3);
  ModelParams p = ModelParams::initialize(6, 3, rng);
  const Vocabulary v({"a", "b", "c", "d", "e", "f"});
  for (auto topic : top_words(p, v, 6)) {
    std::sort(topic.begin(), topic.end());
    EXPECT_EQ(topic, v.words());
  }
  EXPECT_THROW(top_words(p, v, 7), Error);
}

TEST(WordNeighborsTest, ExcludesQueryAndFindsTwin) {
  Rng rng(4);
  ModelParams p = ModelParams::initialize(6, 4, rng);
  for (std::size_t j = 0; j < 4; ++j) p.w(j, 4) = p.w(j, 1);  // words 1 and 4 identical
  const Vocabulary v({"a", "gun", "c", "d", "firearm", "f"});
  const auto n1 = word_neighbors(p, v, "gun", 5);
  EXPECT_EQ(n1.size(), 5u);
  EXPECT_EQ(n1[0], "firearm");
  EXPECT_EQ(std::count(n1.begin(), n1.end(), "gun"), 0);
  EXPECT_EQ(word_neighbors(p, v, "firearm", 1)[0], "gun");
}

TEST(WordNeighborsTest, InvariantToUniformScaling) {
  Rng rng(5);
  ModelParams p = ModelParams::initialize(30, 8, rng);
  std::vector<std::string> words;
  for (int i = 0; i < 30; ++i) words.push_back(fixtures::token(i));
  const Vocabulary v(words);
  const auto before = word_neighbors(p, v, "w003", 6);
  for (double& w : p.w.data()) w *= 3.7;
  EXPECT_EQ(word_neighbors(p, v, "w003", 6), before);
}

TEST(WordNeighborsTest, UnknownWordSuggestsMatches) {
  Rng rng(6);
  const auto p = ModelParams::initialize(3, 2, rng);
  const Vocabulary v({"weapon", "weapons", "hockey"});
  try {
    word_neighbors(p, v, "weapn", 2);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("weapon"), std::string::npos) << msg;
  }
}

TEST(SoftmaxHeadTest, SeparableBlobs) {
  Rng rng(7);
  DenseMatrix xtr, xte;
  std::vector<std::size_t> ytr, yte;
  blobs(400, 5, rng, xtr, ytr);
  blobs(200, 5, rng, xte, yte);
  EXPECT_GE(fit_softmax_head(xtr, ytr, xte, yte), 0.95);
}

TEST(SoftmaxHeadTest, RandomLabelsAtChance) {
  Rng rng(8);
  const auto xtr = random_matrix(1000, 10, rng);
  const auto xte = random_matrix(2000, 10, rng);
  std::vector<std::size_t> ytr(1000), yte(2000);
  for (auto& y : ytr) y = rng.below(10);
  for (auto& y : yte) y = rng.below(10);
  HeadConfig cfg;
  cfg.epochs = 20;
  const double acc = fit_softmax_head(xtr, ytr, xte, yte, cfg);
  EXPECT_NEAR(acc, 0.1, 0.05);
}

TEST(SoftmaxHeadTest, ConstantFeaturesPredictMajority) {
  DenseMatrix xtr(100, 3, 0.5), xte(40, 3, 0.5);
  std::vector<std::size_t> ytr(100), yte(40);
  for (std::size_t i = 0; i < 100; ++i) ytr[i] = i < 60 ? 2 : (i < 85 ? 0 : 1);
  for (std::size_t i = 0; i < 40; ++i) yte[i] = i < 22 ? 2 : (i < 30 ? 0 : 1);
  EXPECT_NEAR(fit_softmax_head(xtr, ytr, xte, yte), 22.0 / 40.0, 1e-15);
}

TEST(SoftmaxHeadTest, SingleClassRejected) {
  DenseMatrix x(4, 2, 1.0);
  std::vector<std::size_t> y(4, 0);
  EXPECT_THROW(fit_softmax_head(x, y, x, y), Error);
}

TEST(SoftmaxHeadTest, Deterministic) {
  Rng rng(9);
  DenseMatrix xtr, xte;
  std::vector<std::size_t> ytr, yte;
  blobs(100, 4, rng, xtr, ytr);
  blobs(100, 4, rng, xte, yte);
  for (auto& v : xtr.data()) v += 0.5 * rng.normal();
  HeadConfig cfg;
  cfg.epochs = 10;
  EXPECT_EQ(fit_softmax_head(xtr, ytr, xte, yte, cfg), fit_softmax_head(xtr, ytr, xte, yte, cfg));
}

TEST(F1Test, PerfectAndSilent) {
  const std::vector<LabelSet> truth = {{0}, {1}, {0, 1}};
  const auto perfect = f1_scores(truth, truth, 2);
  EXPECT_EQ(perfect.macro_f1, 1.0);
  EXPECT_EQ(perfect.micro_f1, 1.0);
  const std::vector<LabelSet> none(3);
  const auto silent = f1_scores(none, truth, 2);
  EXPECT_EQ(silent.macro_f1, 0.0);
  EXPECT_EQ(silent.micro_f1, 0.0);
}

TEST(F1Test, HandComputedCase) {
  // label 0: tp=2 fp=1 fn=1 -> F1 2/3; label 1: tp=1 fp=1 fn=1 -> F1 1/2.
  // pooled: tp=3 fp=2 fn=2 -> P=R=0.6.
  const std::vector<LabelSet> truth = {{0}, {0, 1}, {1}, {0}};
  const std::vector<LabelSet> pred = {{0}, {0}, {0, 1}, {1}};
  const auto f = f1_scores(pred, truth, 2);
  EXPECT_NEAR(f.macro_f1, 7.0 / 12.0, 1e-15);
  EXPECT_NEAR(f.micro_f1, 0.6, 1e-15);
}

TEST(F1Test, MaskExcludesFromMacro) {
  const std::vector<LabelSet> truth = {{0}, {1}};
  const std::vector<LabelSet> pred = {{0}, {}};
  const std::vector<std::uint8_t> mask = {1, 0};
  const auto f = f1_scores(pred, truth, 2, mask);
  EXPECT_EQ(f.macro_f1, 1.0);
  EXPECT_EQ(f.excluded_labels, (std::vector<std::size_t>{1}));
  EXPECT_NEAR(f.micro_f1, 2.0 / 3.0, 1e-15);
}

TEST(MlcHeadTest, LearnsIndependentLabels) {
  Rng rng(10);
  auto make = [&](std::size_t n, DenseMatrix& x, std::vector<LabelSet>& sets) {
    x = DenseMatrix(n, 3);
    sets.assign(n, {});
    for (std::size_t r = 0; r < n; ++r) {
      const bool a = rng.uniform() < 0.5, b = rng.uniform() < 0.5;
      x(r, 0) = (a ? 1.0 : -1.0) + 0.2 * rng.normal();
      x(r, 1) = (b ? 1.0 : -1.0) + 0.2 * rng.normal();
      x(r, 2) = rng.normal();
      if (a) sets[r].push_back(0);
      if (b) sets[r].push_back(1);
      if (!a && !b) sets[r].push_back(2);
    }
  };
  DenseMatrix xtr, xte;
  std::vector<LabelSet> str, ste;
  make(400, xtr, str);
  make(200, xte, ste);
  const auto f = fit_mlc_head(xtr, str, xte, ste, 4);  // label 3 never appears
  EXPECT_GT(f.micro_f1, 0.9);
  EXPECT_GT(f.macro_f1, 0.85);
  EXPECT_EQ(f.excluded_labels, (std::vector<std::size_t>{3}));
}

TEST(MlcHeadTest, EmptyTrainingLabelSetRejected) {
  DenseMatrix x(2, 2, 1.0);
  const std::vector<LabelSet> sets = {{0}, {}};
  EXPECT_THROW(fit_mlc_head(x, sets, x, sets, 1), Error);
}

TEST(RSquaredTest, Definitions) {
  const Vector y = {0.1, 0.4, 0.7, 0.2};
  EXPECT_EQ(r_squared(y, y), 1.0);
  const Vector mean(4, 0.35);
  EXPECT_NEAR(r_squared(mean, y), 0.0, 1e-15);
  EXPECT_LT(r_squared(Vector{0.9, 0.9, 0.0, 0.9}, y), 0.0);
  EXPECT_THROW(r_squared(y, Vector(4, 0.3)), Error);
}

TEST(RegressionHeadTest, LinearTarget) {
  Rng rng(11);
  auto make = [&](std::size_t n, DenseMatrix& x, Vector& y) {
    x = DenseMatrix(n, 4);
    y.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < 4; ++c) x(r, c) = rng.uniform(-1, 1);
      y[r] = 0.5 + 0.15 * x(r, 0) - 0.1 * x(r, 1) + 0.05 * x(r, 2);
    }
  };
  DenseMatrix xtr, xte;
  Vector ytr, yte;
  make(500, xtr, ytr);
  make(200, xte, yte);
  EXPECT_GE(fit_regression_head(xtr, ytr, xte, yte), 0.9);
}

TEST(RegressionHeadTest, ErrorsAndDeterminism) {
  Rng rng(12);
  const auto x = random_matrix(20, 3, rng);
  EXPECT_THROW(fit_regression_head(x, Vector(20, 0.4), x, Vector(20, 0.4)), Error);
  Vector y(20);
  for (auto& v : y) v = rng.uniform();
  Vector bad = y;
  bad[0] = 1.5;
  EXPECT_THROW(fit_regression_head(x, bad, x, y), Error);
  HeadConfig cfg;
  cfg.epochs = 5;
  EXPECT_EQ(fit_regression_head(x, y, x, y, cfg), fit_regression_head(x, y, x, y, cfg));
}

TEST(RetrievalTest, SingleLabelCorpus) {
  Rng rng(13);
  const auto tr = random_matrix(30, 4, rng), te = random_matrix(5, 4, rng);
  const std::vector<std::size_t> ytr(30, 2), yte(5, 2);
  const auto r = retrieval_precision(tr, ytr, te, yte, default_retrieval_fractions());
  for (double p : r.precision) EXPECT_EQ(p, 1.0);
}

TEST(RetrievalTest, HandRankedInstance) {
  // Cosines to the query (1, 0): t0 1, t3 0.9988, t5 0.894, t1 0.707,
  // t2 0, t4 -1. Labels in that order: A B A B A A.
  const DenseMatrix tr(6, 2, {1, 0, 1, 1, 0, 1, 2, 0.1, -1, 0, 1, 0.5});
  const std::vector<std::size_t> ytr = {0, 1, 0, 1, 0, 0};
  const DenseMatrix te(1, 2, {1, 0});
  const std::vector<std::size_t> yte = {0};
  const std::vector<double> fractions = {1.0 / 6.0, 0.34, 0.5, 4.0 / 6.0, 1.0};
  const auto r = retrieval_precision(tr, ytr, te, yte, fractions);
  EXPECT_NEAR(r.precision[0], 1.0, 1e-15);
  EXPECT_NEAR(r.precision[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.precision[2], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.precision[3], 2.0 / 4.0, 1e-15);
  EXPECT_NEAR(r.precision[4], 4.0 / 6.0, 1e-15);
}

TEST(RetrievalTest, FullFractionIsBaseRate) {
  Rng rng(14);
  const auto tr = random_matrix(50, 5, rng), te = random_matrix(20, 5, rng);
  std::vector<std::size_t> ytr(50), yte(20);
  for (auto& y : ytr) y = rng.below(3);
  for (auto& y : yte) y = rng.below(3);
  const std::vector<double> full = {1.0};
  const auto r = retrieval_precision(tr, ytr, te, yte, full);
  double expected = 0;
  for (std::size_t q : yte) expected += static_cast<double>(std::count(ytr.begin(), ytr.end(), q)) / 50.0;
  EXPECT_NEAR(r.precision[0], expected / 20.0, 1e-12);
}

TEST(RetrievalTest, RandomLabelsNearChance) {
  Rng rng(15);
  const auto tr = random_matrix(1000, 8, rng), te = random_matrix(100, 8, rng);
  std::vector<std::size_t> ytr(1000), yte(100);
  for (auto& y : ytr) y = rng.below(4);
  for (auto& y : yte) y = rng.below(4);
  const std::vector<double> fr = {0.05, 0.2};
  const auto r = retrieval_precision(tr, ytr, te, yte, fr);
  for (double p : r.precision) EXPECT_NEAR(p, 0.25, 0.05);
}

TEST(RetrievalTest, ZeroQuerySkipped) {
  const DenseMatrix tr(2, 2, {1, 0, 0, 1});
  const DenseMatrix te(2, 2, {0, 0, 1, 0});
  const std::vector<std::size_t> ytr = {0, 1}, yte = {1, 0};
  const std::vector<double> fr = {0.5};
  const auto r = retrieval_precision(tr, ytr, te, yte, fr);
  EXPECT_EQ(r.skipped_queries, 1u);
  EXPECT_EQ(r.precision[0], 1.0);
  const std::vector<double> bad = {0.0};
  EXPECT_THROW(retrieval_precision(tr, ytr, te, yte, bad), Error);
}

TEST(EncodedFileTest, WriteThenRead) {
  Rng rng(16);
  const auto m = random_matrix(3, 4, rng);
  const std::vector<std::string> ids = {"a", "b", "c"};
  std::stringstream buf;
  write_encoded(buf, ids, m);
  const auto back = read_encoded(buf);
  EXPECT_EQ(back.ids, ids);
  EXPECT_EQ(back.vectors, m);
}

TEST(EncodedFileTest, RejectsRaggedRows) {
  std::istringstream in("{\"id\":\"a\",\"vec\":[1,2]}\n{\"id\":\"b\",\"vec\":[1]}\n");
  EXPECT_THROW(read_encoded(in), Error);
}

TEST(LabelIndexTest, SortedIds) {
  LabelIndex idx;
  for (const char* l : {"sci", "alt", "rec", "alt"}) idx.add(l);
  idx.finalize();
  EXPECT_EQ(idx.size(), 3u);
  EXPECT_EQ(idx.id("alt"), 0u);
  EXPECT_EQ(idx.id("sci"), 2u);
  EXPECT_EQ(idx.id("zzz"), LabelIndex::npos);
}
