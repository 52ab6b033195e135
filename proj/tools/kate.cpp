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

// kate: train, encode and evaluate k-competitive autoencoders.
//
//   kate train     --corpus docs.jsonl --out model.kate [--topics 128 --k 32 ...]
//   kate encode    --model model.kate --corpus docs.jsonl [--out enc.jsonl]
//   kate eval      --task classify|mlc|regress|mscd --model model.kate ...
//   kate topics    --model model.kate [--n 10]
//   kate neighbors --model model.kate --word weapon [--n 5]
//   kate retrieve  --model model.kate --train a.jsonl --test b.jsonl

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kate/kate.hpp"

namespace {

using nlohmann::json;

struct TrainArgs {
  std::string corpus, vocab_file, out, history;
  std::size_t vocab_size = 2000;
  std::size_t valid = 1000;
  std::optional<std::size_t> k;
  std::string variant = "kate", selection = "absolute", activation = "tanh";
  bool quiet = false;
  kate::TrainConfig cfg;
};

struct HeadArgs {
  std::string model, train, test, task, activation = "tanh", report;
  kate::HeadConfig head;
};

struct QueryArgs {
  std::string model, corpus, out = "-", vocab_file, activation = "tanh", word, train, test, csv;
  std::size_t n = 10;
  std::size_t neighbors_n = 5;
  bool absolute = false;
  std::vector<double> fractions = kate::default_retrieval_fractions();
};

kate::Variant parse_variant(const std::string& s) {
  if (s == "kate") return kate::Variant::kate;
  if (s == "ksae") return kate::Variant::ksae;
  return kate::Variant::plain;
}

kate::Activation parse_activation(const std::string& s) {
  return s == "sigmoid" ? kate::Activation::sigmoid : kate::Activation::tanh;
}

kate::Dataset load_for_model(const std::string& corpus, const kate::Vocabulary& vocab) {
  return kate::make_dataset(kate::read_corpus(corpus), vocab);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw kate::Error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

int cmd_train(TrainArgs& a) {
  auto& cfg = a.cfg;
  cfg.variant = parse_variant(a.variant);
  cfg.selection = a.selection == "sign_split" ? kate::Selection::sign_split : kate::Selection::absolute;
  cfg.hidden_activation = parse_activation(a.activation);
  cfg.k = a.k ? *a.k : kate::default_k(cfg.topics);
  cfg.validate();

  auto docs = kate::read_corpus(a.corpus);
  if (docs.empty()) throw kate::Error("empty corpus");
  kate::Vocabulary vocab = a.vocab_file.empty() ? kate::build_vocabulary(docs, a.vocab_size)
                                                : kate::read_vocabulary(a.vocab_file);
  const auto all = kate::make_dataset(std::move(docs), vocab);
  const auto [train_set, valid_set] = kate::split_dataset(all, a.valid, cfg.seed);

  const auto result = kate::train(train_set, valid_set, cfg, [&](const kate::EpochRecord& e) {
    if (!a.quiet) {
      std::cerr << "epoch " << e.epoch << "  train " << std::setprecision(6) << e.train_loss
                << "  valid " << e.valid_loss << '\n';
    }
  });
  kate::save_model(result.params, vocab, a.out);

  json config = kate::to_json(cfg);
  config["corpus"] = a.corpus;
  config["vocab_size"] = vocab.size();
  config["valid"] = a.valid;
  json history = kate::to_json(result.history);
  history["config"] = std::move(config);
  write_json_file(a.history.empty() ? a.out + ".history.json" : a.history, history);
  if (!a.quiet) std::cerr << "best epoch " << result.history.best_epoch << ", wrote " << a.out << '\n';
  return 0;
}

int cmd_encode(const QueryArgs& a) {
  const auto model = kate::load_model(a.model);
  if (!a.vocab_file.empty() && !(kate::read_vocabulary(a.vocab_file) == model.vocab)) {
    throw kate::Error("vocabulary mismatch");
  }
  const auto ds = load_for_model(a.corpus, model.vocab);
  const auto enc = kate::encode_dataset(model.params, ds, parse_activation(a.activation));
  std::vector<std::string> ids;
  for (const auto& d : ds.docs) ids.push_back(d.id);
  if (a.out == "-") {
    kate::write_encoded(std::cout, ids, enc);
  } else {
    std::ofstream out(a.out);
    if (!out) throw kate::Error("cannot open '" + a.out + "' for writing");
    kate::write_encoded(out, ids, enc);
  }
  return 0;
}

int cmd_eval(const HeadArgs& a) {
  const auto model = kate::load_model(a.model);
  json config = {{"model", a.model}, {"task", a.task}};
  json report;
  if (a.task == "mscd") {
    report = kate::make_report("mscd", "mscd", kate::mscd(model.params.w), config);
  } else {
    if (a.train.empty() || a.test.empty()) throw kate::Error("--train and --test are required for " + a.task);
    const auto act = parse_activation(a.activation);
    const auto train_ds = load_for_model(a.train, model.vocab);
    const auto test_ds = load_for_model(a.test, model.vocab);
    const auto xtr = kate::encode_dataset(model.params, train_ds, act);
    const auto xte = kate::encode_dataset(model.params, test_ds, act);
    config["train"] = a.train;
    config["test"] = a.test;
    config["activation"] = a.activation;
    config["head"] = kate::to_json(a.head);

    if (a.task == "classify") {
      kate::LabelIndex labels;
      for (const auto& d : train_ds.docs) {
        if (!d.label) throw kate::Error("training document '" + d.id + "' has no label");
        labels.add(*d.label);
      }
      labels.finalize();
      std::vector<std::size_t> ytr, yte;
      for (const auto& d : train_ds.docs) ytr.push_back(labels.id(*d.label));
      for (const auto& d : test_ds.docs) {
        if (!d.label) throw kate::Error("test document '" + d.id + "' has no label");
        yte.push_back(labels.id(*d.label));
      }
      report = kate::make_report("classify", "accuracy", kate::fit_softmax_head(xtr, ytr, xte, yte, a.head), config);
    } else if (a.task == "mlc") {
      kate::LabelIndex labels;
      for (const auto* ds : {&train_ds, &test_ds}) {
        for (const auto& d : ds->docs) {
          for (const auto& l : d.labels) labels.add(l);
        }
      }
      labels.finalize();
      auto sets = [&](const kate::Dataset& ds) {
        std::vector<kate::LabelSet> out;
        for (const auto& d : ds.docs) {
          kate::LabelSet s;
          for (const auto& l : d.labels) s.push_back(labels.id(l));
          out.push_back(std::move(s));
        }
        return out;
      };
      const auto f = kate::fit_mlc_head(xtr, sets(train_ds), xte, sets(test_ds), labels.size(), a.head);
      report = kate::make_report("mlc", "macro_f1", f.macro_f1, config);
      report["micro_f1"] = f.micro_f1;
      json excluded = json::array();
      for (std::size_t l : f.excluded_labels) excluded.push_back(labels.names()[l]);
      report["excluded_labels"] = excluded;
    } else {
      auto scores = [](const kate::Dataset& ds) {
        kate::Vector out;
        for (const auto& d : ds.docs) {
          if (!d.score) throw kate::Error("document '" + d.id + "' has no score");
          out.push_back(*d.score);
        }
        return out;
      };
      report = kate::make_report("regress", "r2",
                                 kate::fit_regression_head(xtr, scores(train_ds), xte, scores(test_ds), a.head),
                                 config);
    }
  }
  std::cout << report.dump(2) << '\n';
  if (!a.report.empty()) write_json_file(a.report, report);
  return 0;
}

int cmd_topics(const QueryArgs& a) {
  const auto model = kate::load_model(a.model);
  const auto mode = a.absolute ? kate::WeightMode::absolute : kate::WeightMode::signed_weight;
  for (const auto& topic : kate::top_words(model.params, model.vocab, a.n, mode)) {
    for (std::size_t i = 0; i < topic.size(); ++i) std::cout << (i ? " " : "") << topic[i];
    std::cout << '\n';
  }
  return 0;
}

int cmd_neighbors(const QueryArgs& a) {
  const auto model = kate::load_model(a.model);
  for (const auto& w : kate::word_neighbors(model.params, model.vocab, a.word, a.neighbors_n)) std::cout << w << '\n';
  return 0;
}

int cmd_retrieve(const QueryArgs& a) {
  const auto model = kate::load_model(a.model);
  const auto act = parse_activation(a.activation);
  const auto train_ds = load_for_model(a.train, model.vocab);
  const auto test_ds = load_for_model(a.test, model.vocab);
  kate::LabelIndex labels;
  for (const auto* ds : {&train_ds, &test_ds}) {
    for (const auto& d : ds->docs) {
      if (!d.label) throw kate::Error("document '" + d.id + "' has no label");
      labels.add(*d.label);
    }
  }
  labels.finalize();
  std::vector<std::size_t> ytr, yte;
  for (const auto& d : train_ds.docs) ytr.push_back(labels.id(*d.label));
  for (const auto& d : test_ds.docs) yte.push_back(labels.id(*d.label));
  const auto r = kate::retrieval_precision(kate::encode_dataset(model.params, train_ds, act), ytr,
                                           kate::encode_dataset(model.params, test_ds, act), yte,
                                           a.fractions);
  std::cout << "fraction  precision\n";
  for (std::size_t i = 0; i < r.fractions.size(); ++i) {
    std::printf("%-9g %.4f\n", r.fractions[i], r.precision[i]);
  }
  if (r.skipped_queries) std::cerr << r.skipped_queries << " zero-vector queries skipped\n";
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw kate::Error("cannot open '" + a.csv + "' for writing");
    out << "fraction,precision\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.fractions.size(); ++i) out << r.fractions[i] << ',' << r.precision[i] << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-competitive autoencoder for text"};
  app.require_subcommand(1);
  const std::vector<std::string> activations = {"tanh", "sigmoid"};

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a model on a JSONL corpus");
  train->add_option("--corpus", ta.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  train->add_option("--out", ta.out, "Model file to write")->required();
  train->add_option("--history", ta.history, "History JSON (default: <out>.history.json)");
  train->add_option("--vocab", ta.vocab_file, "Use this vocabulary (one token per line)")->check(CLI::ExistingFile);
  train->add_option("--vocab-size", ta.vocab_size, "Most frequent tokens kept")->capture_default_str();
  train->add_option("--topics", ta.cfg.topics, "Hidden neurons m")->capture_default_str();
  train->add_option("--k", ta.k, "Winners per sample (default: 6/32/102 for m=20/128/512, else m/4)");
  train->add_option("--alpha", ta.cfg.alpha, "Energy amplification")->capture_default_str();
  train->add_option("--batch", ta.cfg.batch_size, "Minibatch size")->capture_default_str();
  train->add_option("--lr", ta.cfg.lr, "Adadelta step multiplier")->capture_default_str();
  train->add_option("--rho", ta.cfg.rho, "Adadelta decay")->capture_default_str();
  train->add_option("--eps", ta.cfg.eps, "Adadelta epsilon")->capture_default_str();
  train->add_option("--patience", ta.cfg.patience, "Early stopping patience")->capture_default_str();
  train->add_option("--max-epochs", ta.cfg.max_epochs, "Epoch cap")->capture_default_str();
  train->add_option("--valid", ta.valid, "Held-out validation documents")->capture_default_str();
  train->add_option("--seed", ta.cfg.seed, "Seed for init, split and shuffling")->capture_default_str();
  train->add_option("--variant", ta.variant, "kate | ksae | plain")
      ->check(CLI::IsMember({"kate", "ksae", "plain"}))->capture_default_str();
  train->add_option("--selection", ta.selection, "ksae selection: absolute | sign_split")
      ->check(CLI::IsMember({"absolute", "sign_split"}))->capture_default_str();
  train->add_option("--activation", ta.activation, "Hidden activation")
      ->check(CLI::IsMember(activations))->capture_default_str();
  train->add_flag("--quiet", ta.quiet, "No progress output");

  QueryArgs qa;
  auto* encode = app.add_subcommand("encode", "Encode documents with a trained model");
  encode->add_option("--model", qa.model)->required()->check(CLI::ExistingFile);
  encode->add_option("--corpus", qa.corpus)->required()->check(CLI::ExistingFile);
  encode->add_option("--out", qa.out, "Encoded JSONL, '-' for stdout")->capture_default_str();
  encode->add_option("--vocab", qa.vocab_file, "Check the model against this vocabulary");
  encode->add_option("--activation", qa.activation)->check(CLI::IsMember(activations))->capture_default_str();

  HeadArgs ha;
  auto* eval = app.add_subcommand("eval", "Evaluate a model");
  eval->add_option("--task", ha.task)->required()->check(CLI::IsMember({"classify", "mlc", "regress", "mscd"}));
  eval->add_option("--model", ha.model)->required()->check(CLI::ExistingFile);
  eval->add_option("--train", ha.train, "Training corpus for the head")->check(CLI::ExistingFile);
  eval->add_option("--test", ha.test, "Test corpus")->check(CLI::ExistingFile);
  eval->add_option("--activation", ha.activation)->check(CLI::IsMember(activations))->capture_default_str();
  eval->add_option("--head-epochs", ha.head.epochs)->capture_default_str();
  eval->add_option("--head-batch", ha.head.batch_size)->capture_default_str();
  eval->add_option("--head-lr", ha.head.optimizer.lr)->capture_default_str();
  eval->add_option("--head-seed", ha.head.seed)->capture_default_str();
  eval->add_option("--hidden", ha.head.hidden, "Regression head width")->capture_default_str();
  eval->add_option("--report", ha.report, "Also write the JSON report here");

  auto* topics = app.add_subcommand("topics", "Print the top words of every hidden neuron");
  topics->add_option("--model", qa.model)->required()->check(CLI::ExistingFile);
  topics->add_option("--n", qa.n)->capture_default_str();
  topics->add_flag("--absolute", qa.absolute, "Rank by |weight| instead of signed weight");

  auto* neighbors = app.add_subcommand("neighbors", "Nearest words in the learned embedding");
  neighbors->add_option("--model", qa.model)->required()->check(CLI::ExistingFile);
  neighbors->add_option("--word", qa.word)->required();
  neighbors->add_option("--n", qa.neighbors_n)->capture_default_str();

  auto* retrieve = app.add_subcommand("retrieve", "Precision versus retrieved fraction");
  retrieve->add_option("--model", qa.model)->required()->check(CLI::ExistingFile);
  retrieve->add_option("--train", qa.train)->required()->check(CLI::ExistingFile);
  retrieve->add_option("--test", qa.test)->required()->check(CLI::ExistingFile);
  retrieve->add_option("--activation", qa.activation)->check(CLI::IsMember(activations))->capture_default_str();
  retrieve->add_option("--fractions", qa.fractions)->delimiter(',');
  retrieve->add_option("--csv", qa.csv, "Write fraction,precision rows here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* sub = &app;
    for (const auto* s : app.get_subcommands()) sub = s;
    std::cerr << sub->help();
    return 2;
  }

  try {
    if (*train) return cmd_train(ta);
    if (*encode) return cmd_encode(qa);
    if (*eval) return cmd_eval(ha);
    if (*topics) return cmd_topics(qa);
    if (*neighbors) return cmd_neighbors(qa);
    if (*retrieve) return cmd_retrieve(qa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
