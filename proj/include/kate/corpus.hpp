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

#ifndef KATE_CORPUS_HPP
#define KATE_CORPUS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kate/numerics.hpp"

namespace kate {

struct TokenizedDoc {
  std::string id;
  std::map<std::string, std::uint64_t> counts;
  std::optional<std::string> label;
  std::vector<std::string> labels;
  std::optional<double> score;
};

/// Ordered token list with its inverse index.
class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (!index_.emplace(words_[i], i).second) {
        throw Error("duplicate vocabulary token '" + words_[i] + "'");
      }
    }
  }

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& operator[](std::size_t i) const { return words_[i]; }

  std::optional<std::size_t> find(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sparse log-normalized count vector. Indices strictly increasing.
struct DocVector {
  std::vector<SparseEntry> entries;
  std::size_t dim = 0;

  Vector dense() const {
    Vector out(dim, 0.0);
    for (const auto& e : entries) out[e.index] = e.value;
    return out;
  }

  friend bool operator==(const DocVector&, const DocVector&) = default;
};

struct Dataset {
  std::vector<DocVector> vectors;
  std::vector<TokenizedDoc> docs;
  Vocabulary vocab;

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }
};

/// The max_size most frequent tokens; ties go to the lexicographically
/// smaller token.
inline Vocabulary build_vocabulary(std::span<const TokenizedDoc> docs, std::size_t max_size) {
  if (docs.empty()) throw Error("empty corpus");
  if (max_size == 0) throw Error("vocabulary size must be at least 1");

  std::unordered_map<std::string, std::uint64_t> totals;
  for (const auto& doc : docs) {
    for (const auto& [token, n] : doc.counts) totals[token] += n;
  }
  std::vector<std::pair<std::string, std::uint64_t>> ranked(totals.begin(), totals.end());
  const std::size_t keep = std::min(max_size, ranked.size());
  auto order = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), order);

  std::vector<std::string> words;
  words.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) words.push_back(std::move(ranked[i].first));
  return Vocabulary(std::move(words));
}

/// x_i = log(1 + n_i) / max_j log(1 + n_j) over in-vocabulary tokens.
inline DocVector vectorize(const TokenizedDoc& doc, const Vocabulary& vocab) {
  if (vocab.empty()) throw Error("vectorize: empty vocabulary");
  DocVector out;
  out.dim = vocab.size();
  double max_log = 0.0;
  for (const auto& [token, n] : doc.counts) {
    if (n == 0) continue;
    const auto idx = vocab.find(token);
    if (!idx) continue;
    const double v = std::log1p(static_cast<double>(n));
    out.entries.push_back({static_cast<std::uint32_t>(*idx), v});
    max_log = std::max(max_log, v);
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  for (auto& e : out.entries) e.value /= max_log;
  return out;
}

inline Dataset make_dataset(std::vector<TokenizedDoc> docs, Vocabulary vocab) {
  Dataset ds;
  ds.vectors.resize(docs.size());
  parallel_for(docs.size(), [&](std::size_t i) { ds.vectors[i] = vectorize(docs[i], vocab); });
  ds.docs = std::move(docs);
  ds.vocab = std::move(vocab);
  return ds;
}

inline Dataset subset(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.vocab = ds.vocab;
  out.vectors.reserve(rows.size());
  out.docs.reserve(rows.size());
  for (std::size_t r : rows) {
    out.vectors.push_back(ds.vectors[r]);
    out.docs.push_back(ds.docs[r]);
  }
  return out;
}

/// Seeded random hold-out. Both halves keep the original document order.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::size_t valid_size,
                                                 std::uint64_t seed) {
  if (valid_size == 0 || valid_size >= ds.size()) {
    throw Error("validation size " + std::to_string(valid_size) +
                " must be in (0, " + std::to_string(ds.size()) + ")");
  }
  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<std::size_t> valid(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(valid_size));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(valid_size), order.end());
  std::sort(valid.begin(), valid.end());
  std::sort(train.begin(), train.end());
  return {subset(ds, train), subset(ds, valid)};
}

// ---------------------------------------------------------------------------
// File formats

/// Parses one JSON Lines corpus record. Throws with the given line number.
inline TokenizedDoc parse_corpus_line(const std::string& line, std::size_t line_no) {
  using nlohmann::json;
  auto fail = [line_no](const std::string& what) -> Error {
    return Error("corpus line " + std::to_string(line_no) + ": " + what);
  };
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw fail(std::string("malformed JSON (") + e.what() + ")");
  }
  if (!obj.is_object()) throw fail("expected a JSON object");

  TokenizedDoc doc;
  const auto id = obj.find("id");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw fail("missing or empty \"id\"");
  }
  doc.id = id->get<std::string>();

  const auto counts = obj.find("counts");
  if (counts == obj.end() || !counts->is_object()) throw fail("missing \"counts\" object");
  for (const auto& [token, n] : counts->items()) {
    if (!n.is_number_integer() || n.get<std::int64_t>() < 0) {
      throw fail("count for '" + token + "' must be a non-negative integer");
    }
    const auto v = n.get<std::uint64_t>();
    if (v > 0) doc.counts.emplace(token, v);
  }

  if (const auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw fail("\"label\" must be a string");
    doc.label = it->get<std::string>();
  }
  if (const auto it = obj.find("labels"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw fail("\"labels\" must be an array of strings");
    for (const auto& l : *it) {
      if (!l.is_string()) throw fail("\"labels\" must be an array of strings");
      doc.labels.push_back(l.get<std::string>());
    }
  }
  if (const auto it = obj.find("score"); it != obj.end() && !it->is_null()) {
    if (!it->is_number()) throw fail("\"score\" must be a number");
    doc.score = it->get<double>();
  }
  return doc;
}

inline std::vector<TokenizedDoc> read_corpus(std::istream& in) {
  std::vector<TokenizedDoc> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto doc = parse_corpus_line(line, line_no);
    if (!seen.insert(doc.id).second) {
      throw Error("corpus line " + std::to_string(line_no) + ": duplicate id '" + doc.id + "'");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::vector<TokenizedDoc> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  return read_corpus(in);
}

inline void write_corpus(std::ostream& out, std::span<const TokenizedDoc> docs) {
  for (const auto& doc : docs) {
    nlohmann::json obj;
    obj["id"] = doc.id;
    obj["counts"] = nlohmann::json::object();
    for (const auto& [token, n] : doc.counts) obj["counts"][token] = n;
    if (doc.label) obj["label"] = *doc.label;
    if (!doc.labels.empty()) obj["labels"] = doc.labels;
    if (doc.score) obj["score"] = *doc.score;
    out << obj.dump() << '\n';
  }
}

inline Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    words.push_back(line);
  }
  return Vocabulary(std::move(words));
}

inline Vocabulary read_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary file '" + path + "'");
  return read_vocabulary(in);
}

inline void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (const auto& w : vocab.words()) out << w << '\n';
}

}  // namespace kate

#endif  // KATE_CORPUS_HPP
