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

// Binary model file, all integers and floats little-endian:
//
//   "KATEMODL"              8 bytes
//   version                 u32 (= 1)
//   d, m                    u32, u32
//   W                       m*d float64, row-major (row = hidden neuron)
//   b                       m float64
//   c                       d float64
//   token count             u32
//   per token               u32 byte length, UTF-8 bytes

#ifndef KATE_SERIALIZE_HPP
#define KATE_SERIALIZE_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "kate/corpus.hpp"
#include "kate/model.hpp"

namespace kate {

inline constexpr std::array<char, 8> kModelMagic = {'K', 'A', 'T', 'E', 'M', 'O', 'D', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

struct LoadedModel {
  ModelParams params;
  Vocabulary vocab;
};

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(buf, 4);
}

inline void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(buf, 8);
}

inline void read_exact(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw Error("truncated model file");
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  read_exact(in, reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& in) {
  unsigned char buf[8];
  read_exact(in, reinterpret_cast<char*>(buf), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

inline std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(std::string(what) + " does not fit the model file format");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

inline void write_model(std::ostream& out, const ModelParams& params, const Vocabulary& vocab) {
  if (vocab.size() != params.d()) throw Error("vocabulary mismatch");
  out.write(kModelMagic.data(), kModelMagic.size());
  detail::put_u32(out, kModelVersion);
  detail::put_u32(out, detail::checked_u32(params.d(), "input dimension"));
  detail::put_u32(out, detail::checked_u32(params.m(), "hidden dimension"));
  for (double v : params.w.data()) detail::put_f64(out, v);
  for (double v : params.b) detail::put_f64(out, v);
  for (double v : params.c) detail::put_f64(out, v);
  detail::put_u32(out, detail::checked_u32(vocab.size(), "vocabulary size"));
  for (const auto& w : vocab.words()) {
    detail::put_u32(out, detail::checked_u32(w.size(), "token length"));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
  }
  if (!out) throw Error("failed to write model");
}

inline LoadedModel read_model(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kModelMagic) {
    throw Error("not a KATE model file");
  }
  const std::uint32_t version = detail::get_u32(in);
  if (version != kModelVersion) {
    throw Error("unsupported model file version " + std::to_string(version) +
                " (supported versions: " + std::to_string(kModelVersion) + ")");
  }
  const std::size_t d = detail::get_u32(in);
  const std::size_t m = detail::get_u32(in);
  if (d == 0 || m == 0) throw Error("model file has a zero dimension");
  const auto here = in.tellg();
  if (here != std::istream::pos_type(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    const auto need = (static_cast<unsigned long long>(m) * d + m + d) * 8ull;
    if (end != std::istream::pos_type(-1) &&
        static_cast<unsigned long long>(end - here) < need) {
      throw Error("truncated model file");
    }
  }

  LoadedModel model;
  model.params = ModelParams::zeros(d, m);
  for (double& v : model.params.w.data()) v = detail::get_f64(in);
  for (double& v : model.params.b) v = detail::get_f64(in);
  for (double& v : model.params.c) v = detail::get_f64(in);

  const std::uint32_t count = detail::get_u32(in);
  if (count != d) throw Error("vocabulary mismatch");
  std::vector<std::string> words(count);
  for (auto& w : words) {
    const std::uint32_t len = detail::get_u32(in);
    w.resize(len);
    detail::read_exact(in, w.data(), len);
  }
  model.vocab = Vocabulary(std::move(words));
  return model;
}

inline void save_model(const ModelParams& params, const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_model(out, params, vocab);
}

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return read_model(in);
}

inline nlohmann::json to_json(const TrainConfig& cfg) {
  return {
      {"topics", cfg.topics},
      {"k", cfg.k},
      {"alpha", cfg.alpha},
      {"batch_size", cfg.batch_size},
      {"lr", cfg.lr},
      {"rho", cfg.rho},
      {"eps", cfg.eps},
      {"patience", cfg.patience},
      {"max_epochs", cfg.max_epochs},
      {"seed", cfg.seed},
      {"variant", to_string(cfg.variant)},
      {"selection", to_string(cfg.selection)},
      {"hidden_activation", to_string(cfg.hidden_activation)},
      {"init", "glorot_uniform"},
      {"rng", Rng::kAlgorithm},
  };
}

inline nlohmann::json to_json(const TrainHistory& h) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : h.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"valid_loss", e.valid_loss}});
  }
  return {
      {"initial_train_loss", h.initial_train_loss},
      {"initial_valid_loss", h.initial_valid_loss},
      {"epochs", std::move(epochs)},
      {"best_epoch", h.best_epoch},
      {"stopped_early", h.stopped_early},
  };
}

}  // namespace kate

#endif  // KATE_SERIALIZE_HPP
