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

// Deterministic feature extraction for templates and parameters.
//
// Template tokens map to Gaussian random features seeded by a hash of
// (seed, token); a template is the L2-normalized mean over its non-wildcard
// tokens. Parameters are embedded per character and averaged. Precomputed
// sentence vectors can be imported instead of the hashed template features.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "logformer/drain.hpp"
#include "logformer/error.hpp"
#include "logformer/rng.hpp"
#include "logformer/sequencer.hpp"
#include "logformer/tensor.hpp"

namespace logformer::embed {

enum class Mode { kHashBuiltin, kImportFile };

struct EmbedderConfig {
  std::size_t d = 64;
  std::size_t c = 16;
  std::uint64_t seed = 0;
  Mode mode = Mode::kHashBuiltin;

  void validate() const {
    if (d == 0) throw ConfigError("embedder.d must be positive");
    if (c == 0) throw ConfigError("embedder.c must be positive");
  }
};

using Vector = std::vector<double>;

inline Vector token_features(std::string_view token, std::size_t dim, std::uint64_t seed) {
  Rng rng(splitmix64(fnv1a64(token, splitmix64(seed))));
  Vector v(dim);
  for (auto& x : v) x = rng.normal();
  return v;
}

inline void normalize(Vector& v) {
  double n2 = 0;
  for (double x : v) n2 += x * x;
  if (n2 == 0) return;
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : v) x *= inv;
}

/// Unit-norm bag-of-token embedding. Wildcards are skipped unless the
/// template consists of nothing else.
inline Vector embed_template(std::span<const std::string> tokens, const EmbedderConfig& cfg) {
  if (tokens.empty()) throw DataError("embed_template: empty template");
  Vector acc(cfg.d, 0.0);
  std::size_t used = 0;
  for (const auto& tok : tokens) {
    if (tok == drain::kWildcard) continue;
    const auto f = token_features(tok, cfg.d, cfg.seed);
    for (std::size_t i = 0; i < cfg.d; ++i) acc[i] += f[i];
    ++used;
  }
  if (used == 0) acc = token_features(drain::kWildcard, cfg.d, cfg.seed);
  else
    for (auto& x : acc) x /= static_cast<double>(used);
  normalize(acc);
  return acc;
}

/// Per-character feature table, shared by all parameter embeddings.
class CharTable {
 public:
  explicit CharTable(const EmbedderConfig& cfg) : c_(cfg.c) {
    const std::uint64_t base = derive_seed(cfg.seed, "param-chars");
    table_.resize(256 * c_);
    for (std::size_t ch = 0; ch < 256; ++ch) {
      Rng rng(splitmix64(base ^ (0x100 + ch)));
      for (std::size_t k = 0; k < c_; ++k) table_[ch * c_ + k] = rng.normal();
    }
  }

  std::size_t dim() const noexcept { return c_; }
  std::span<const double> row(unsigned char ch) const { return {table_.data() + ch * c_, c_}; }

 private:
  std::size_t c_;
  std::vector<double> table_;
};

/// Mean character feature of the params joined by single spaces; zero when
/// there are no params.
inline Vector embed_params_chars(std::span<const std::string> params, const CharTable& chars) {
  Vector acc(chars.dim(), 0.0);
  if (params.empty()) return acc;
  std::size_t n = 0;
  auto add = [&](unsigned char ch) {
    const auto r = chars.row(ch);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += r[k];
    ++n;
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) add(' ');
    for (unsigned char ch : params[i]) add(ch);
  }
  if (n == 0) return acc;
  for (auto& x : acc) x /= static_cast<double>(n);
  return acc;
}

inline Vector embed_params_chars(std::span<const std::string> params, const EmbedderConfig& cfg) {
  return embed_params_chars(params, CharTable(cfg));
}

/// Template vectors indexed by template id.
using TemplateVectors = std::vector<Vector>;

inline TemplateVectors embed_templates(std::span<const drain::Template> table,
                                       const EmbedderConfig& cfg) {
  TemplateVectors out;
  out.reserve(table.size());
  for (const auto& t : table) out.push_back(embed_template(t.tokens, cfg));
  return out;
}

/// Reads "d=<int>" then "template_id<TAB>v1,v2,..." lines. Every template in
/// the table must be present; vectors are re-normalized to unit length.
inline TemplateVectors import_embeddings(std::istream& in, std::span<const drain::Template> table,
                                         std::size_t d) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("d=", 0) != 0)
    throw DataError("embedding file must start with 'd=<int>'");
  std::size_t file_d = 0;
  try {
    file_d = std::stoul(line.substr(2));
  } catch (const std::exception&) {
    throw DataError("embedding file header '" + line + "' is not d=<int>");
  }
  if (file_d != d)
    throw DataError("embedding dimension " + std::to_string(file_d) + " != configured " +
                    std::to_string(d));
  std::map<std::int64_t, Vector> found;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("embedding line " + std::to_string(line_no) + " lacks a tab");
    std::int64_t id = 0;
    Vector v;
    try {
      id = std::stoll(line.substr(0, tab));
      std::stringstream ss(line.substr(tab + 1));
      std::string cell;
      while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw DataError("embedding line " + std::to_string(line_no) + " is malformed");
    }
    if (v.size() != d)
      throw DataError("embedding for template " + std::to_string(id) + " has dimension " +
                      std::to_string(v.size()) + ", expected " + std::to_string(d));
    normalize(v);
    found[id] = std::move(v);
  }
  std::vector<std::int64_t> missing;
  TemplateVectors out;
  out.reserve(table.size());
  for (const auto& t : table) {
    auto it = found.find(t.id);
    if (it == found.end()) {
      missing.push_back(t.id);
      continue;
    }
    out.push_back(it->second);
  }
  if (!missing.empty()) {
    std::string ids;
    for (auto id : missing) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    throw DataError("embedding file is missing template ids: " + ids);
  }
  return out;
}

inline TemplateVectors import_embeddings(const std::string& path,
                                         std::span<const drain::Template> table, std::size_t d) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file '" + path + "'");
  return import_embeddings(in, table, d);
}

/// Model input for one window: template features X_E (l x d), parameter
/// features P_E (l x c) and the real-position mask.
template <class Real>
struct WindowEmbedding {
  Tensor<Real> x;  // X_E
  Tensor<Real> p;  // P_E
  Mask mask;
  std::size_t true_length = 0;

  std::size_t length() const { return mask.size(); }

  /// Copy restricted to the real prefix; padded rows never influence the
  /// model output, so forward passes on the trimmed copy agree exactly.
  WindowEmbedding trimmed() const {
    if (true_length == mask.size()) return *this;
    WindowEmbedding t;
    const std::size_t d = x.cols(), c = p.cols();
    auto xs = x.data();
    auto ps = p.data();
    t.x = Tensor<Real>::from_vector(true_length, d,
                                    std::vector<Real>(xs.begin(), xs.begin() + true_length * d));
    t.p = Tensor<Real>::from_vector(true_length, c,
                                    std::vector<Real>(ps.begin(), ps.begin() + true_length * c));
    t.mask.assign(true_length, 1);
    t.true_length = true_length;
    return t;
  }
};

/// Parameter features for every event, keyed by position in the event list.
inline std::vector<Vector> embed_event_params(std::span<const drain::ParsedEvent> events,
                                              const EmbedderConfig& cfg) {
  CharTable chars(cfg);
  std::vector<Vector> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(embed_params_chars(e.params, chars));
  return out;
}

template <class Real>
WindowEmbedding<Real> embed_window(const seq::Window& w, const EmbedderConfig& cfg,
                                   const TemplateVectors& templates, const CharTable& chars) {
  const std::size_t l = w.events.size();
  std::vector<Real> x(l * cfg.d, Real(0));
  std::vector<Real> p(l * cfg.c, Real(0));
  WindowEmbedding<Real> out;
  out.mask.assign(l, 0);
  out.true_length = w.true_length;
  for (std::size_t i = 0; i < w.true_length; ++i) {
    const auto& e = w.events[i];
    if (e.template_id < 0 || static_cast<std::size_t>(e.template_id) >= templates.size())
      throw DataError("embed_window: unresolvable template id " + std::to_string(e.template_id));
    const auto& tv = templates[static_cast<std::size_t>(e.template_id)];
    if (tv.size() != cfg.d) throw DataError("embed_window: template vector has wrong dimension");
    for (std::size_t k = 0; k < cfg.d; ++k) x[i * cfg.d + k] = static_cast<Real>(tv[k]);
    const auto pv = embed_params_chars(e.params, chars);
    for (std::size_t k = 0; k < cfg.c; ++k) p[i * cfg.c + k] = static_cast<Real>(pv[k]);
    out.mask[i] = 1;
  }
  out.x = Tensor<Real>::from_vector(l, cfg.d, std::move(x));
  out.p = Tensor<Real>::from_vector(l, cfg.c, std::move(p));
  return out;
}

template <class Real>
WindowEmbedding<Real> embed_window(const seq::Window& w, const EmbedderConfig& cfg,
                                   const TemplateVectors& templates) {
  return embed_window<Real>(w, cfg, templates, CharTable(cfg));
}

}  // namespace logformer::embed
