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

// Trains a small model on a toy corpus built in memory, then prints its
// topics, a word's neighbors and a document encoding.

#include <cstdio>
#include <string>
#include <vector>

#include "kate/kate.hpp"

int main() {
  // Three themes, each with its own words plus shared filler.
  const std::vector<std::vector<std::string>> themes = {
      {"god", "church", "bible", "faith", "jesus", "pray"},
      {"hockey", "team", "game", "season", "goal", "coach"},
      {"gun", "weapon", "law", "crime", "firearm", "court"},
  };
  const std::vector<std::string> filler = {"people", "time", "good", "make", "year"};

  kate::Rng rng(42);
  std::vector<kate::TokenizedDoc> docs;
  for (int n = 0; n < 300; ++n) {
    kate::TokenizedDoc doc;
    doc.id = "doc" + std::to_string(n);
    const auto& theme = themes[n % themes.size()];
    for (int t = 0; t < 20; ++t) {
      const auto& pool = rng.uniform() < 0.75 ? theme : filler;
      ++doc.counts[pool[rng.below(pool.size())]];
    }
    docs.push_back(std::move(doc));
  }

  auto vocab = kate::build_vocabulary(docs, 2000);
  const auto all = kate::make_dataset(docs, vocab);
  const auto [train_set, valid_set] = kate::split_dataset(all, 50, 1);

  kate::TrainConfig cfg;
  cfg.topics = 6;
  cfg.k = 2;
  cfg.max_epochs = 60;
  const auto result = kate::train(train_set, valid_set, cfg);
  std::printf("stopped after %zu epochs, best %zu, valid loss %.4f\n", result.history.epochs.size(),
              result.history.best_epoch, result.history.epochs[result.history.best_epoch - 1].valid_loss);

  const auto topics = kate::top_words(result.params, vocab, 4);
  for (std::size_t j = 0; j < topics.size(); ++j) {
    std::printf("topic %zu:", j);
    for (const auto& w : topics[j]) std::printf(" %s", w.c_str());
    std::printf("\n");
  }

  std::printf("near 'gun':");
  for (const auto& w : kate::word_neighbors(result.params, vocab, "gun", 3)) std::printf(" %s", w.c_str());
  std::printf("\nmscd %.3f\n", kate::mscd(result.params.w));

  const auto z = kate::encode(result.params, all.vectors[0]);
  std::printf("%s ->", all.docs[0].id.c_str());
  for (double v : z) std::printf(" %+.3f", v);
  std::printf("\n");
}
