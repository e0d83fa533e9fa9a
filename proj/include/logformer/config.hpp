// Copyright 2026 The logformer-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Pipeline configuration: one JSON document with sections parser,
// sequencer, embedder, model, train and eval. Every field has a default,
// unknown keys are rejected, and the fingerprint is the SHA-256 of the
// canonical (key-sorted, compact) serialization.

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "logformer/drain.hpp"
#include "logformer/embedder.hpp"
#include "logformer/error.hpp"
#include "logformer/hash.hpp"
#include "logformer/model.hpp"
#include "logformer/pipeline.hpp"
#include "logformer/rng.hpp"
#include "logformer/trainer.hpp"

namespace logformer::config {

enum class Precision { kDouble, kSingle };

inline std::string to_string(Precision p) { return p == Precision::kDouble ? "double" : "single"; }

inline Precision precision_from_string(const std::string& s) {
  if (s == "double") return Precision::kDouble;
  if (s == "single") return Precision::kSingle;
  throw ConfigError("precision must be 'double' or 'single', got '" + s + "'");
}

/// kPretrain also covers training from scratch.
enum class TrainStage { kPretrain, kAdapter, kFullTune };

struct EmbedderSection {
  std::size_t d = 64;
  std::size_t c = 16;
  embed::Mode mode = embed::Mode::kHashBuiltin;
  std::string import_file;  // used when mode is import_file
};

struct ModelSection {
  std::size_t h = 8;
  std::size_t d_ff = 256;
  std::size_t n_layers = 2;
  std::size_t m = 8;
  model::AdapterKind adapter_kind = model::AdapterKind::kParallel;
  bool log_attention = true;
  double ln_eps = 1e-5;
};

struct TrainSection {
  train::TrainConfig base;  // seed field unused; derived from the root seed
  double adapt_max_lr = 1e-2;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  Precision precision = Precision::kDouble;
  drain::ParserConfig parser;
  pipeline::SequencerConfig sequencer;
  EmbedderSection embedder;
  ModelSection model;
  TrainSection train;
  double eval_threshold = 0.5;

  model::ModelConfig model_config() const {
    model::ModelConfig m;
    m.d = embedder.d;
    m.c = embedder.c;
    m.l = sequencer.window_size;
    m.h = model.h;
    m.d_ff = model.d_ff;
    m.n_layers = model.n_layers;
    m.m = model.m;
    m.adapter_kind = model.adapter_kind;
    m.log_attention = model.log_attention;
    m.ln_eps = model.ln_eps;
    return m;
  }

  embed::EmbedderConfig embedder_config() const {
    return {embedder.d, embedder.c, derive_seed(seed, "embedder"), embedder.mode};
  }

  /// Training settings for a stage. Only adapter tuning uses adapt_max_lr;
  /// full fine-tuning keeps max_lr.
  train::TrainConfig train_config(TrainStage stage) const {
    auto t = train.base;
    t.seed = derive_seed(seed, stage == TrainStage::kPretrain ? "train:pretrain" : "train:adapt");
    if (stage == TrainStage::kAdapter) t.max_lr = train.adapt_max_lr;
    return t;
  }

  void validate() const {
    parser.validate();
    sequencer.validate();
    model_config().validate();
    train.base.validate();
    if (!(train.adapt_max_lr > 0)) throw ConfigError("train.adapt_max_lr must be positive");
    if (!(eval_threshold > 0 && eval_threshold < 1))
      throw ConfigError("eval.threshold must be in (0, 1)");
    if (embedder.mode == embed::Mode::kImportFile && embedder.import_file.empty())
      throw ConfigError("embedder.import_file is required when embedder.mode is import_file");
  }
};

inline std::string to_string(embed::Mode m) {
  return m == embed::Mode::kHashBuiltin ? "hash_builtin" : "import_file";
}

inline embed::Mode embed_mode_from_string(const std::string& s) {
  if (s == "hash_builtin") return embed::Mode::kHashBuiltin;
  if (s == "import_file") return embed::Mode::kImportFile;
  throw ConfigError("embedder.mode must be hash_builtin or import_file, got '" + s + "'");
}

inline nlohmann::json to_json(const PipelineConfig& c) {
  const auto& t = c.train.base;
  return {
      {"seed", c.seed},
      {"precision", to_string(c.precision)},
      {"parser",
       {{"depth", c.parser.depth},
        {"similarity_threshold", c.parser.similarity_threshold},
        {"max_children", c.parser.max_children},
        {"mask_patterns", c.parser.mask_patterns}}},
      {"sequencer",
       {{"window_size", c.sequencer.window_size},
        {"mode", pipeline::to_string(c.sequencer.mode)},
        {"id_regex", c.sequencer.id_regex},
        {"split", c.sequencer.split}}},
      {"embedder",
       {{"d", c.embedder.d},
        {"c", c.embedder.c},
        {"mode", to_string(c.embedder.mode)},
        {"import_file", c.embedder.import_file}}},
      {"model",
       {{"h", c.model.h},
        {"d_ff", c.model.d_ff},
        {"n_layers", c.model.n_layers},
        {"m", c.model.m},
        {"adapter_kind", model::to_string(c.model.adapter_kind)},
        {"log_attention", c.model.log_attention},
        {"ln_eps", c.model.ln_eps}}},
      {"train",
       {{"max_lr", t.max_lr},
        {"adapt_max_lr", c.train.adapt_max_lr},
        {"beta1", t.beta1},
        {"beta2", t.beta2},
        {"eps", t.eps},
        {"batch_size", t.batch_size},
        {"epochs", t.epochs},
        {"eval_interval", t.eval_interval},
        {"pct_start", t.pct_start},
        {"div_factor", t.div_factor},
        {"final_div_factor", t.final_div_factor}}},
      {"eval", {{"threshold", c.eval_threshold}}},
  };
}

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::string& where,
                       const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k))
      throw ConfigError("config: unknown key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: '" + where + "." + key + "' has the wrong type");
  }
}

inline const nlohmann::json& section(const nlohmann::json& root, const char* name) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  return root.contains(name) ? root.at(name) : kEmpty;
}

}  // namespace detail

inline PipelineConfig from_json(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::read;
  PipelineConfig c;
  check_keys(j, "", {"seed", "precision", "parser", "sequencer", "embedder", "model", "train", "eval"});
  read(j, "seed", c.seed, "");
  std::string s;
  if (j.contains("precision")) {
    read(j, "precision", s, "");
    c.precision = precision_from_string(s);
  }

  const auto& p = detail::section(j, "parser");
  check_keys(p, "parser", {"depth", "similarity_threshold", "max_children", "mask_patterns"});
  read(p, "depth", c.parser.depth, "parser");
  read(p, "similarity_threshold", c.parser.similarity_threshold, "parser");
  read(p, "max_children", c.parser.max_children, "parser");
  read(p, "mask_patterns", c.parser.mask_patterns, "parser");

  const auto& q = detail::section(j, "sequencer");
  check_keys(q, "sequencer", {"window_size", "mode", "id_regex", "split"});
  read(q, "window_size", c.sequencer.window_size, "sequencer");
  if (q.contains("mode")) {
    read(q, "mode", s, "sequencer");
    c.sequencer.mode = pipeline::window_mode_from_string(s);
  }
  read(q, "id_regex", c.sequencer.id_regex, "sequencer");
  read(q, "split", c.sequencer.split, "sequencer");

  const auto& e = detail::section(j, "embedder");
  check_keys(e, "embedder", {"d", "c", "mode", "import_file"});
  read(e, "d", c.embedder.d, "embedder");
  read(e, "c", c.embedder.c, "embedder");
  if (e.contains("mode")) {
    read(e, "mode", s, "embedder");
    c.embedder.mode = embed_mode_from_string(s);
  }
  read(e, "import_file", c.embedder.import_file, "embedder");

  const auto& m = detail::section(j, "model");
  check_keys(m, "model", {"h", "d_ff", "n_layers", "m", "adapter_kind", "log_attention", "ln_eps"});
  read(m, "h", c.model.h, "model");
  read(m, "d_ff", c.model.d_ff, "model");
  read(m, "n_layers", c.model.n_layers, "model");
  read(m, "m", c.model.m, "model");
  if (m.contains("adapter_kind")) {
    read(m, "adapter_kind", s, "model");
    c.model.adapter_kind = model::adapter_kind_from_string(s);
  }
  read(m, "log_attention", c.model.log_attention, "model");
  read(m, "ln_eps", c.model.ln_eps, "model");

  const auto& t = detail::section(j, "train");
  check_keys(t, "train",
             {"max_lr", "adapt_max_lr", "beta1", "beta2", "eps", "batch_size", "epochs",
              "eval_interval", "pct_start", "div_factor", "final_div_factor"});
  auto& b = c.train.base;
  read(t, "max_lr", b.max_lr, "train");
  read(t, "adapt_max_lr", c.train.adapt_max_lr, "train");
  read(t, "beta1", b.beta1, "train");
  read(t, "beta2", b.beta2, "train");
  read(t, "eps", b.eps, "train");
  read(t, "batch_size", b.batch_size, "train");
  read(t, "epochs", b.epochs, "train");
  read(t, "eval_interval", b.eval_interval, "train");
  read(t, "pct_start", b.pct_start, "train");
  read(t, "div_factor", b.div_factor, "train");
  read(t, "final_div_factor", b.final_div_factor, "train");

  const auto& v = detail::section(j, "eval");
  check_keys(v, "eval", {"threshold"});
  read(v, "threshold", c.eval_threshold, "eval");

  c.validate();
  return c;
}

inline PipelineConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

/// SHA-256 of the canonical serialization; independent of key order in the
/// source file.
inline std::string fingerprint(const PipelineConfig& c) { return sha256_hex(to_json(c).dump()); }

/// Fingerprint of the settings that determine tensor shapes and template
/// features; checkpoints are only interchangeable when it matches.
inline std::string model_fingerprint(const PipelineConfig& c) {
  auto j = to_json(c);
  nlohmann::json sub = {{"model", j["model"]},
                        {"embedder", {{"d", c.embedder.d}, {"c", c.embedder.c}}},
                        {"window_size", c.sequencer.window_size}};
  return sha256_hex(sub.dump());
}

}  // namespace logformer::config
